"""Input cleaning for panel cells, country identifiers and year ranges."""
import html
import math
import re
from typing import List, Optional, Tuple

MISSING_TOKENS = frozenset({"", "NA"})


def sanitize_identifier(text: str, max_length: int = 120) -> str:
    """
    Clean a country code or name:
    - Decoding HTML entities (spreadsheet exports carry them)
    - Removing HTML tags
    - Collapsing whitespace
    - Enforcing max length
    """
    if not text:
        return ""

    text = html.unescape(str(text))
    text = re.sub(r"<[^>]+>", "", text)
    text = re.sub(r"\s+", " ", text)
    return text.strip()[:max_length]


def parse_value(token) -> Optional[float]:
    """Return the float in a cell, or None when the cell is missing.

    `NA`, empty cells and anything that does not parse as a finite number
    count as missing. Sign is not checked here.
    """
    if token is None:
        return None
    if isinstance(token, float) and math.isnan(token):
        return None

    text = str(token).strip()
    if text in MISSING_TOKENS:
        return None
    try:
        value = float(text)
    except ValueError:
        return None
    if not math.isfinite(value):
        return None
    return value


def parse_year_range(spec: Optional[str]) -> Optional[Tuple[int, int]]:
    """Parse `A:B` (inclusive). `None` or empty means all years.

    An open end (`1990:` or `:2000`) is allowed.
    """
    if spec is None or not spec.strip():
        return None

    match = re.fullmatch(r"\s*(\d{4})?\s*:\s*(\d{4})?\s*", spec)
    if not match:
        single = spec.strip()
        if re.fullmatch(r"\d{4}", single):
            return int(single), int(single)
        raise ValueError(f"year range must look like A:B, got {spec!r}")

    start = int(match.group(1)) if match.group(1) else -10**9
    end = int(match.group(2)) if match.group(2) else 10**9
    return start, end


def parse_float_list(spec: str) -> List[float]:
    """Parse `0.05,0.01` style lists."""
    return [float(part) for part in spec.split(",") if part.strip()]


def parse_int_list(spec: str) -> List[int]:
    """Parse `2025,2030,2035` style lists."""
    return [int(part) for part in spec.split(",") if part.strip()]
