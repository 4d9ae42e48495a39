"""Pipeline stages, one runner class per command."""
