import sys

from co2dist.cli import main

sys.exit(main())
