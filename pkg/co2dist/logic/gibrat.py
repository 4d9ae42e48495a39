"""Gibrat's law: growth samples, the four size-growth regressions and a proportionate-growth simulator."""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
import statsmodels.api as sm
from scipy import stats

from co2dist.errors import DegenerateRegressorError, InsufficientDataError, ParameterError
from co2dist.logic import dist
from co2dist.logic.dist import ParamVector
from co2dist.logic.ingest import EmissionsPanel

logger = logging.getLogger(__name__)

MIN_PAIRS = 3
EXACT_FIT_TOL = 1e3 * np.finfo(float).eps


class GibratMethod(str, Enum):
    M1 = "M1"  # log S_t on log S_{t-1}, H0: beta = 1
    M2 = "M2"  # S_t/S_{t-1} on (S_t + S_{t-1})/2, H0: beta = 0
    M3 = "M3"  # S_t/S_{t-1} on S_{t-1}, H0: beta = 0
    M4 = "M4"  # log(S_t/S_{t-1}) on S_{t-1}, H0: beta = 0

    def __str__(self) -> str:
        return self.value


NULL_VALUE: Dict[GibratMethod, float] = {
    GibratMethod.M1: 1.0,
    GibratMethod.M2: 0.0,
    GibratMethod.M3: 0.0,
    GibratMethod.M4: 0.0,
}


@dataclass(frozen=True, eq=False)
class GrowthSample:
    """Emissions of the same countries in two years."""

    countries: Tuple[str, ...]
    before: np.ndarray
    after: np.ndarray
    year_from: int
    year_to: int

    @property
    def n(self) -> int:
        return len(self.countries)

    @property
    def label(self) -> str:
        return f"{self.year_from}-{self.year_to}"


@dataclass(frozen=True)
class GibratFit:
    method: GibratMethod
    alpha: float
    beta: float
    se_beta: float
    null_value: float
    t_statistic: float
    p_value: float
    n: int
    robust: bool = False

    def rejects(self, level: float) -> bool:
        return self.p_value < level


def build_growth_sample(panel: EmissionsPanel, year_from: int, year_to: int) -> GrowthSample:
    """Pair countries present (and positive) in both years."""
    before = panel.values[:, panel.year_index(year_from)]
    after = panel.values[:, panel.year_index(year_to)]
    keep = ~np.isnan(before) & ~np.isnan(after)
    if keep.sum() < MIN_PAIRS:
        raise InsufficientDataError(
            f"{year_from}-{year_to}: need at least {MIN_PAIRS} paired countries, got {int(keep.sum())}"
        )
    countries = tuple(c for c, k in zip(panel.countries, keep) if k)
    return GrowthSample(
        countries=countries,
        before=before[keep].copy(),
        after=after[keep].copy(),
        year_from=int(year_from),
        year_to=int(year_to),
    )


def _is_flat(residual: np.ndarray, scale: float) -> bool:
    return float(np.std(residual)) <= EXACT_FIT_TOL * scale


def regression_variables(method, sample: GrowthSample) -> Tuple[np.ndarray, np.ndarray]:
    """(response, regressor) for one method."""
    method = GibratMethod(method)
    before, after = sample.before, sample.after
    if method is GibratMethod.M1:
        return np.log(after), np.log(before)
    if method is GibratMethod.M2:
        return after / before, (after + before) / 2.0
    if method is GibratMethod.M3:
        return after / before, before
    return np.log(after / before), before


def fit_gibrat(method, sample: GrowthSample, robust: bool = False) -> GibratFit:
    """OLS of the method's response on its regressor, with the two-sided t-test of its null."""
    method = GibratMethod(method)
    if sample.n < MIN_PAIRS:
        raise InsufficientDataError(f"need at least {MIN_PAIRS} pairs, got {sample.n}")

    y, x = regression_variables(method, sample)
    if np.ptp(x) == 0:
        raise DegenerateRegressorError(f"{method} {sample.label}: regressor has zero variance")

    design = sm.add_constant(x, has_constant="add")
    model = sm.OLS(y, design)
    results = model.fit(cov_type="HC1") if robust else model.fit()

    alpha, beta = (float(v) for v in results.params)
    se_beta = float(results.bse[1])
    null = NULL_VALUE[method]
    dof = sample.n - 2

    scale = float(np.sqrt(np.mean(y * y)))
    if _is_flat(y - null * x, scale):
        # The null holds exactly; the standard error is rounding noise.
        t_stat, p_value = 0.0, 1.0
    elif np.sqrt(results.ssr / sample.n) <= EXACT_FIT_TOL * scale or not se_beta > 0:
        t_stat, p_value = np.inf, 0.0
    else:
        t_stat = (beta - null) / se_beta
        p_value = float(2.0 * stats.t.sf(abs(t_stat), df=dof)) if dof > 0 else np.nan

    return GibratFit(
        method=method,
        alpha=alpha,
        beta=beta,
        se_beta=se_beta,
        null_value=null,
        t_statistic=float(t_stat),
        p_value=p_value,
        n=sample.n,
        robust=robust,
    )


def fit_all_methods(sample: GrowthSample, robust: bool = False) -> List[GibratFit]:
    return [fit_gibrat(method, sample, robust=robust) for method in GibratMethod]


def consecutive_year_fits(
    panel: EmissionsPanel,
    years: Optional[Iterable[int]] = None,
    robust: bool = False,
) -> List[Tuple[GrowthSample, List[GibratFit]]]:
    """All four regressions for every pair (t-1, t) of consecutive years in the panel."""
    selected = sorted(set(panel.years if years is None else years) & set(panel.years))
    results = []
    for year_from, year_to in zip(selected, selected[1:]):
        if year_to != year_from + 1:
            continue
        try:
            sample = build_growth_sample(panel, year_from, year_to)
            results.append((sample, fit_all_methods(sample, robust=robust)))
        except (InsufficientDataError, DegenerateRegressorError) as exc:
            logger.warning("Skipping %s-%s: %s", year_from, year_to, exc)
    return results


def format_beta(method, beta: float) -> str:
    """Two decimals for M1, one significant digit in scientific notation otherwise."""
    if GibratMethod(method) is GibratMethod.M1:
        return f"{beta:.2f}"
    return f"{beta:.0e}"


def simulate_gibrat(
    n_countries: int,
    n_years: int,
    initial: ParamVector,
    shock_sd: float,
    seed: int,
    start_year: int = 1970,
) -> EmissionsPanel:
    """Proportionate growth: S_t = S_{t-1} * exp(eps_t), eps_t ~ N(0, shock_sd^2) i.i.d."""
    if n_countries < 1:
        raise ParameterError(f"n_countries must be >= 1, got {n_countries}")
    if n_years < 2:
        raise ParameterError(f"n_years must be >= 2, got {n_years}")
    if not shock_sd >= 0:
        raise ParameterError(f"shock_sd must be >= 0, got {shock_sd}")

    rng = np.random.default_rng(seed)
    initial_sizes = dist.sample(initial, n_countries, rng=rng)
    shocks = rng.normal(0.0, shock_sd, size=(n_countries, n_years - 1))
    log_sizes = np.log(initial_sizes)[:, None] + np.concatenate(
        [np.zeros((n_countries, 1)), np.cumsum(shocks, axis=1)], axis=1
    )

    width = max(3, len(str(n_countries)))
    countries = tuple(f"C{i:0{width}d}" for i in range(1, n_countries + 1))
    years = tuple(range(start_year, start_year + n_years))
    return EmissionsPanel(countries, years, np.exp(log_sizes))
