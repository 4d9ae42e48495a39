"""Parse policy scenario files into plain attribute dicts."""
from pathlib import Path
from typing import Any, Dict, Union

from dotenv import dotenv_values

from co2dist.errors import ConfigError

KNOWN_KEYS = (
    "dataset",
    "base_year",
    "reference_year",
    "target_year",
    "R_target",
    "fix",
    "fixed_value",
    "from_trend",
    "trend_start",
    "trend_end",
)

TRUE_WORDS = {"1", "true", "yes", "on"}
FALSE_WORDS = {"0", "false", "no", "off", ""}


def parse_scenario_text(values: Dict[str, Any]) -> Dict[str, Any]:
    """
    Normalise raw KEY=value pairs:
    - Keys are matched case-insensitively (`r_target` works for `R_target`)
    - Empty values are dropped
    - `from_trend` becomes a bool
    Unknown keys are an error.
    """
    lookup = {key.lower(): key for key in KNOWN_KEYS}
    result: Dict[str, Any] = {}
    for raw_key, raw_value in values.items():
        key = lookup.get(raw_key.strip().lower())
        if key is None:
            raise ConfigError(f"unknown scenario key {raw_key!r}")
        value = (raw_value or "").strip()
        if key == "from_trend":
            word = value.lower()
            if word in TRUE_WORDS:
                result[key] = True
            elif word in FALSE_WORDS:
                result[key] = False
            else:
                raise ConfigError(f"from_trend must be true or false, got {raw_value!r}")
            continue
        if value:
            result[key] = value
    return result


def parse_scenario_file(path: Union[str, Path]) -> Dict[str, Any]:
    """Read a `KEY=value` scenario file (comments with `#`)."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"scenario file not found: {path}")
    return parse_scenario_text(dotenv_values(path))
