"""CSV report storage for the pipeline commands."""
import logging
from pathlib import Path
from typing import Iterable, List, Optional, Union

import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.10g"
MISSING = "NA"


def get_report_dir(out_dir: Union[str, Path]) -> Path:
    """Get the output directory, creating it if needed."""
    base_dir = Path(out_dir)
    base_dir.mkdir(parents=True, exist_ok=True)
    return base_dir


def write_table(
    frame: pd.DataFrame,
    out_dir: Union[str, Path],
    name: str,
    written: Optional[List[Path]] = None,
) -> Path:
    """Write one report table with fixed float formatting and return its path.

    `written` collects the path so a failing command can remove what it wrote.
    """
    path = get_report_dir(out_dir) / name
    if written is not None:
        written.append(path)
    frame.to_csv(
        path,
        index=False,
        float_format=FLOAT_FORMAT,
        na_rep=MISSING,
        lineterminator="\n",
        encoding="utf-8",
    )
    logger.info("Wrote %s (%d rows)", path, len(frame))
    return path


def reserve_path(out_dir: Union[str, Path], name: str, written: Optional[List[Path]] = None) -> Path:
    """Path for a file written by another writer (SVG, panel CSV), tracked like write_table."""
    path = get_report_dir(out_dir) / name
    if written is not None:
        written.append(path)
    return path


def load_table(path: Union[str, Path]) -> pd.DataFrame:
    """Read a report table back; `NA` cells become NaN."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    return pd.read_csv(path, na_values=[MISSING], keep_default_na=False)


def remove_files(paths: Iterable[Path]) -> int:
    """Delete partially written outputs; returns how many were removed."""
    removed = 0
    for path in paths:
        try:
            Path(path).unlink()
            removed += 1
        except FileNotFoundError:
            continue
    if removed:
        logger.info("Removed %d partial output file(s)", removed)
    return removed
