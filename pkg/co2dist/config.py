"""Environment, logging and validated run configuration."""
import logging
import os
import sys
from pathlib import Path
from typing import Dict, Literal, Optional, Tuple

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from co2dist.errors import ConfigError
from co2dist.logic.scenario_parser import parse_scenario_file

logger = logging.getLogger(__name__)

DATASET_KEYS = ("edgar", "gcb", "cdiac")
DEFAULT_OUT_DIR = "reports"
DEFAULT_SEED = 20240101
DEFAULT_ALPHAS = (0.05, 0.01)
DEFAULT_FORECAST_YEARS = (2025, 2030, 2035)
DEFAULT_BASE_YEAR = 1990
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def load_environment() -> None:
    """Load a `.env` file from the working directory if there is one."""
    load_dotenv()


def configure_logging(level: Optional[str] = None) -> None:
    """Send log records to stderr; stdout is reserved for report paths."""
    level = (level or os.getenv("CO2DIST_LOG_LEVEL") or "INFO").upper()
    if not isinstance(logging.getLevelName(level), int):
        raise ConfigError(f"unknown log level {level!r}")
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def env_out_dir() -> Path:
    return Path(os.getenv("CO2DIST_OUT_DIR") or DEFAULT_OUT_DIR)


def env_seed() -> int:
    raw = os.getenv("CO2DIST_SEED")
    if not raw:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"CO2DIST_SEED must be an integer, got {raw!r}")


def env_data_dir() -> Optional[Path]:
    raw = os.getenv("CO2DIST_DATA_DIR")
    return Path(raw) if raw else None


def _errors_to_config_error(exc: ValidationError, what: str) -> ConfigError:
    details = "; ".join(
        f"{'.'.join(str(part) for part in error['loc']) or what}: {error['msg']}" for error in exc.errors()
    )
    return ConfigError(f"invalid {what}: {details}")


class DatasetSpec(BaseModel):
    """One input panel and its source-specific handling."""

    model_config = ConfigDict(frozen=True)

    key: Literal["edgar", "gcb", "cdiac"]
    path: Path
    format: Literal["long", "wide"] = "long"
    convert_carbon: bool = False


class RunConfig(BaseModel):
    """Everything a pipeline command needs; identical configs give identical reports."""

    model_config = ConfigDict(frozen=True)

    datasets: Dict[str, DatasetSpec] = Field(default_factory=dict)
    dataset: Optional[str] = None
    years: Optional[Tuple[int, int]] = None
    seed: int = DEFAULT_SEED
    alphas: Tuple[float, ...] = DEFAULT_ALPHAS
    out_dir: Path = Path(DEFAULT_OUT_DIR)
    scenario: Optional[Path] = None
    criterion: Literal["aic", "bic", "hqc"] = "aic"
    robust: bool = False
    hac_lag: Optional[int] = Field(default=None, ge=0)
    forecast_years: Tuple[int, ...] = DEFAULT_FORECAST_YEARS
    base_year: int = DEFAULT_BASE_YEAR
    plot_years: Tuple[int, ...] = ()
    svg: bool = False

    @field_validator("alphas")
    @classmethod
    def _alphas_in_unit_interval(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if not value:
            raise ValueError("at least one significance level is required")
        for alpha in value:
            if not 0.0 < alpha < 1.0:
                raise ValueError(f"significance level must be in (0, 1), got {alpha}")
        return value

    @field_validator("years")
    @classmethod
    def _ordered_years(cls, value: Optional[Tuple[int, int]]) -> Optional[Tuple[int, int]]:
        if value is not None and value[0] > value[1]:
            raise ValueError(f"year range start {value[0]} is after its end {value[1]}")
        return value

    @model_validator(mode="after")
    def _dataset_is_loaded(self) -> "RunConfig":
        if self.dataset is not None and self.datasets and self.dataset not in self.datasets:
            raise ValueError(
                f"dataset {self.dataset!r} has no --input (loaded: {', '.join(sorted(self.datasets))})"
            )
        return self

    @property
    def active_dataset(self) -> DatasetSpec:
        """The dataset commands run on: --dataset, else the first --input."""
        if not self.datasets:
            raise ConfigError("no input dataset given (use --input KEY=PATH)")
        if self.dataset is not None:
            return self.datasets[self.dataset]
        return next(iter(self.datasets.values()))

    @classmethod
    def build(cls, **values) -> "RunConfig":
        try:
            return cls(**values)
        except ValidationError as exc:
            raise _errors_to_config_error(exc, "run configuration") from exc


class Scenario(BaseModel):
    """A policy scenario: which year pins the allocation and which parameter is held fixed."""

    model_config = ConfigDict(frozen=True)

    dataset: Optional[str] = None
    base_year: int
    reference_year: int
    target_year: int
    R_target: float = Field(gt=0)
    fix: Literal["mu", "sigma"]
    fixed_value: Optional[float] = None
    from_trend: bool = False
    trend_start: Optional[int] = None
    trend_end: Optional[int] = None

    @model_validator(mode="after")
    def _fixed_value_source(self) -> "Scenario":
        if self.fixed_value is None and not self.from_trend:
            raise ValueError("give fixed_value or set from_trend=true")
        if self.fixed_value is not None and self.from_trend:
            raise ValueError("fixed_value and from_trend=true are mutually exclusive")
        if self.fix == "sigma" and self.fixed_value is not None and not self.fixed_value > 0:
            raise ValueError(f"a fixed sigma must be > 0, got {self.fixed_value}")
        if self.trend_start is not None and self.trend_end is not None and self.trend_start > self.trend_end:
            raise ValueError("trend_start is after trend_end")
        return self

    @classmethod
    def from_file(cls, path) -> "Scenario":
        values = parse_scenario_file(path)
        try:
            scenario = cls(**values)
        except ValidationError as exc:
            raise _errors_to_config_error(exc, f"scenario {path}") from exc
        logger.info("Loaded scenario %s", path)
        return scenario


class SimulationConfig(BaseModel):
    """A synthetic proportionate-growth panel."""

    model_config = ConfigDict(frozen=True)

    countries: int = Field(default=500, ge=1)
    years: int = Field(default=52, ge=2)
    shock_sd: float = Field(default=0.1, ge=0)
    mu: float = 2.5
    sigma: float = Field(default=2.4, gt=0)
    start_year: int = 1970
    seed: int = DEFAULT_SEED
    out_dir: Path = Path(DEFAULT_OUT_DIR)

    @classmethod
    def build(cls, **values) -> "SimulationConfig":
        try:
            return cls(**values)
        except ValidationError as exc:
            raise _errors_to_config_error(exc, "simulation configuration") from exc
