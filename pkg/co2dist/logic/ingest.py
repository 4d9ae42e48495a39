"""Emissions panels: CSV parsing, unit conversion and descriptive statistics."""
import io
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import stats

from co2dist.errors import InsufficientDataError, PanelFormatError, PanelLookupError
from co2dist.logic.sanitizer import parse_value, sanitize_identifier

logger = logging.getLogger(__name__)

# 1 kg C = 3.664 kg CO2
CARBON_TO_CO2 = 3.664

LONG_HEADER = ["country", "year", "emissions"]
PANEL_FORMATS = ("long", "wide")


@dataclass(frozen=True, eq=False)
class EmissionsPanel:
    """Country x year emissions in MtCO2/year. Missing cells are NaN."""

    countries: Tuple[str, ...]
    years: Tuple[int, ...]
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True).reshape(
            len(self.countries), len(self.years)
        )
        if len(set(self.countries)) != len(self.countries):
            raise PanelFormatError("country identifiers must be unique")
        if any(b <= a for a, b in zip(self.years, self.years[1:])):
            raise PanelFormatError("years must be strictly increasing")
        present = values[~np.isnan(values)]
        if np.any(present <= 0):
            raise PanelFormatError("emission values must be strictly positive")
        values.setflags(write=False)
        object.__setattr__(self, "countries", tuple(self.countries))
        object.__setattr__(self, "years", tuple(int(y) for y in self.years))
        object.__setattr__(self, "values", values)

    @property
    def n_countries(self) -> int:
        return len(self.countries)

    @property
    def n_years(self) -> int:
        return len(self.years)

    def year_index(self, year: int) -> int:
        try:
            return self.years.index(int(year))
        except ValueError:
            raise PanelLookupError(f"year {year} not in panel") from None

    def value(self, country: str, year: int) -> Optional[float]:
        try:
            row = self.countries.index(country)
        except ValueError:
            raise PanelLookupError(f"country {country!r} not in panel") from None
        cell = self.values[row, self.year_index(year)]
        return None if np.isnan(cell) else float(cell)

    def equals(self, other: "EmissionsPanel") -> bool:
        return (
            self.countries == other.countries
            and self.years == other.years
            and np.array_equal(self.values, other.values, equal_nan=True)
        )

    def to_long_frame(self) -> pd.DataFrame:
        """Long frame with one row per cell (NaN when missing), country order then year."""
        rows = []
        for i, country in enumerate(self.countries):
            for j, year in enumerate(self.years):
                rows.append((country, year, self.values[i, j]))
        return pd.DataFrame(rows, columns=LONG_HEADER)


@dataclass(frozen=True)
class YearSummary:
    """One row of the per-year descriptive table."""

    year: int
    n: int
    max: float
    min: float
    mean: float
    sd: float
    skewness: Optional[float]
    kurtosis: Optional[float]

    def as_row(self) -> Dict[str, object]:
        return {
            "year": self.year,
            "n": self.n,
            "max": self.max,
            "min": self.min,
            "mean": self.mean,
            "sd": self.sd,
            "skewness": self.skewness,
            "kurtosis": self.kurtosis,
        }


def _read_csv(source) -> pd.DataFrame:
    try:
        return pd.read_csv(
            source,
            dtype=str,
            keep_default_na=False,
            skipinitialspace=True,
            encoding="utf-8",
        )
    except pd.errors.EmptyDataError:
        raise PanelFormatError("no header row")
    except (pd.errors.ParserError, UnicodeDecodeError) as exc:
        raise PanelFormatError(f"unreadable CSV: {exc}")


def _read_raw(path: Union[str, Path]) -> pd.DataFrame:
    path = Path(path)
    if not path.exists():
        raise PanelLookupError(f"panel file not found: {path}")
    return _read_csv(path)


def _check_value(raw, row: int) -> float:
    value = parse_value(raw)
    if value is None:
        return np.nan
    if value <= 0:
        raise PanelFormatError(f"emissions must be > 0, got {raw!r}", row=row)
    return value


def _parse_year(raw, row: int) -> int:
    try:
        return int(str(raw).strip())
    except ValueError:
        raise PanelFormatError(f"year is not an integer: {raw!r}", row=row) from None


def _from_cells(cells: Dict[Tuple[str, int], float], countries: List[str]) -> EmissionsPanel:
    years = sorted({year for _, year in cells})
    column = {year: j for j, year in enumerate(years)}
    values = np.full((len(countries), len(years)), np.nan)
    row_of = {country: i for i, country in enumerate(countries)}
    for (country, year), value in cells.items():
        values[row_of[country], column[year]] = value
    return EmissionsPanel(tuple(countries), tuple(years), values)


def _load_long(frame: pd.DataFrame) -> EmissionsPanel:
    header = [str(col).strip().lower() for col in frame.columns]
    if header != LONG_HEADER:
        raise PanelFormatError(
            f"long format needs header {','.join(LONG_HEADER)}, got {','.join(header)}",
            row=1,
        )

    cells: Dict[Tuple[str, int], float] = {}
    countries: List[str] = []
    seen = set()
    # Header is line 1 of the file.
    for offset, (country_raw, year_raw, value_raw) in enumerate(frame.itertuples(index=False)):
        row = offset + 2
        country = sanitize_identifier(country_raw)
        if not country:
            raise PanelFormatError("empty country identifier", row=row)
        year = _parse_year(year_raw, row)
        if (country, year) in cells:
            raise PanelFormatError(f"duplicate entry for ({country}, {year})", row=row)
        cells[(country, year)] = _check_value(value_raw, row)
        if country not in seen:
            seen.add(country)
            countries.append(country)

    return _from_cells(cells, countries)


def _load_wide(frame: pd.DataFrame) -> EmissionsPanel:
    header = [str(col).strip() for col in frame.columns]
    if not header or header[0].lower() != "country":
        raise PanelFormatError("wide format needs 'country' as first column", row=1)

    years = []
    for col in header[1:]:
        try:
            years.append(int(col))
        except ValueError:
            raise PanelFormatError(f"column {col!r} is not a year", row=1) from None
    if len(set(years)) != len(years):
        raise PanelFormatError("duplicate year column", row=1)

    cells: Dict[Tuple[str, int], float] = {}
    countries: List[str] = []
    for offset, record in enumerate(frame.itertuples(index=False)):
        row = offset + 2
        country = sanitize_identifier(record[0])
        if not country:
            raise PanelFormatError("empty country identifier", row=row)
        if country in countries:
            raise PanelFormatError(f"duplicate country {country!r}", row=row)
        countries.append(country)
        for year, raw in zip(years, record[1:]):
            cells[(country, year)] = _check_value(raw, row)

    if not countries:
        return EmissionsPanel((), tuple(sorted(years)), np.empty((0, len(years))))
    return _from_cells(cells, countries)


def load_panel(path: Union[str, Path], format: str = "long") -> EmissionsPanel:
    """Parse a long (`country,year,emissions`) or wide (`country,<years>...`) CSV."""
    if format not in PANEL_FORMATS:
        raise PanelFormatError(f"unknown panel format {format!r}")

    frame = _read_raw(path)
    panel = _load_long(frame) if format == "long" else _load_wide(frame)
    logger.info(
        "Loaded %s: %d countries, %d years", path, panel.n_countries, panel.n_years
    )
    return panel


def load_panel_bytes(data: bytes, format: str = "long") -> EmissionsPanel:
    """Parse an uploaded CSV held in memory; same rules as load_panel."""
    if format not in PANEL_FORMATS:
        raise PanelFormatError(f"unknown panel format {format!r}")
    if not data.strip():
        raise PanelFormatError("empty upload")

    frame = _read_csv(io.BytesIO(data))
    return _load_long(frame) if format == "long" else _load_wide(frame)


def write_panel(panel: EmissionsPanel, path: Union[str, Path]) -> None:
    """Write the canonical long CSV. Missing cells are written as `NA`."""
    frame = panel.to_long_frame()
    frame["emissions"] = [
        "NA" if np.isnan(value) else repr(float(value)) for value in frame["emissions"]
    ]
    frame.to_csv(path, index=False, lineterminator="\n")


def convert_carbon_to_co2(panel: EmissionsPanel) -> EmissionsPanel:
    """MtC/year -> MtCO2/year. Missing cells stay missing."""
    return EmissionsPanel(panel.countries, panel.years, panel.values * CARBON_TO_CO2)


def cross_section(panel: EmissionsPanel, year: int) -> Tuple[List[str], np.ndarray]:
    """Countries and present values for one year."""
    column = panel.values[:, panel.year_index(year)]
    present = ~np.isnan(column)
    countries = [c for c, keep in zip(panel.countries, present) if keep]
    return countries, column[present].copy()


def subset_years(panel: EmissionsPanel, start: int, end: int) -> EmissionsPanel:
    """Keep years in [start, end]."""
    keep = [j for j, year in enumerate(panel.years) if start <= year <= end]
    return EmissionsPanel(
        panel.countries,
        tuple(panel.years[j] for j in keep),
        panel.values[:, keep],
    )


def describe(values: Sequence[float], year: int = 0) -> YearSummary:
    """Descriptive statistics of one cross-section.

    Mean and sd are sample statistics; skewness m3/m2^1.5 and kurtosis
    m4/m2^2 use divide-by-n central moments, kurtosis non-excess. Both are
    None when the sample has no spread.
    """
    x = np.asarray(values, dtype=float)
    if x.size < 2:
        raise InsufficientDataError(f"year {year}: need at least 2 values, got {x.size}")

    series = pd.Series(x)
    sd = float(series.std(ddof=1))
    if sd == 0.0:
        skewness = kurtosis = None
    else:
        skewness = float(stats.skew(x, bias=True))
        kurtosis = float(stats.kurtosis(x, fisher=False, bias=True))

    return YearSummary(
        year=int(year),
        n=int(x.size),
        max=float(x.max()),
        min=float(x.min()),
        mean=float(series.mean()),
        sd=sd,
        skewness=skewness,
        kurtosis=kurtosis,
    )


def summarize_year(panel: EmissionsPanel, year: int) -> YearSummary:
    _, values = cross_section(panel, year)
    return describe(values, year)


def summarize_panel(panel: EmissionsPanel, years: Optional[Iterable[int]] = None) -> List[YearSummary]:
    """Summaries for many years; years with fewer than 2 values are skipped."""
    summaries = []
    for year in panel.years if years is None else years:
        try:
            summaries.append(summarize_year(panel, year))
        except InsufficientDataError as exc:
            logger.warning("Skipping year %s: %s", year, exc)
    return summaries
