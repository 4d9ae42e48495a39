"""Exception hierarchy shared by the library, the CLI and the HTTP service."""
from typing import Optional


class Co2DistError(ValueError):
    """Base class for every error raised on purpose by co2dist."""


class PanelFormatError(Co2DistError):
    """A CSV panel could not be parsed or violates the panel invariants."""

    def __init__(self, message: str, row: Optional[int] = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class PanelLookupError(Co2DistError):
    """Unknown year, country or dataset key."""


class InsufficientDataError(Co2DistError):
    """Fewer observations than an operation needs."""


class ParameterError(Co2DistError):
    """A distribution parameter or probability is outside its domain."""


class ConvergenceError(Co2DistError):
    """The likelihood optimizer failed after every restart."""


class DegenerateRegressorError(Co2DistError):
    """A regressor has zero variance."""


class BracketError(Co2DistError):
    """A root bracket has no sign change."""

    def __init__(self, lower: float, upper: float, f_lower: float, f_upper: float):
        self.lower = lower
        self.upper = upper
        self.f_lower = f_lower
        self.f_upper = f_upper
        super().__init__(
            f"no sign change on [{lower:g}, {upper:g}]: "
            f"f(lower)={f_lower:g}, f(upper)={f_upper:g}"
        )


class SampleMismatchError(Co2DistError):
    """Fits being compared were not computed on the same sample."""


class ConfigError(Co2DistError):
    """Invalid run configuration or scenario file."""
