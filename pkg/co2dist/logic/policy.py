"""Turning a global emissions ratio into national targets through lognormal quantiles.

The target-year emissions of the country ranked N+1-i are the lognormal
quantile exp(mu_t + sigma_t * Phi^-1(i / (N+1))). Summing them over the
base-year total gives the global ratio R; dividing each by the country's
reference-year emissions gives its national ratio r_i.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, optimize, special

from co2dist.errors import (
    BracketError,
    InsufficientDataError,
    ParameterError,
    SampleMismatchError,
)
from co2dist.logic.ingest import EmissionsPanel, cross_section

logger = logging.getLogger(__name__)

SIGMA_BRACKET = (1e-6, 50.0)
BRACKET_EXPANSIONS = 8
QUAD_HALF_WIDTH = 40.0

LOW = "low_emission"
MIDDLE = "middle_emission"
HIGH = "high_emission"


@dataclass(frozen=True)
class CountryTarget:
    country: str
    rank: int
    reference_emissions: float
    allocated_emissions: float
    r_i: float
    group: str


@dataclass(frozen=True, eq=False)
class PolicyScenario:
    """Base/reference cross-sections sorted ascending, plus the target-year lognormal."""

    base_year: int
    reference_year: int
    target_year: int
    base_countries: Tuple[str, ...]
    base_emissions: np.ndarray
    reference_countries: Tuple[str, ...]
    reference_emissions: np.ndarray
    mu_t: float
    sigma_t: float
    R_target: float

    def __post_init__(self):
        base = _positive_vector(self.base_emissions, "base emissions")
        reference = _positive_vector(self.reference_emissions, "reference emissions")
        if base.size != reference.size:
            raise SampleMismatchError(
                f"base year has N={base.size} countries, reference year N={reference.size}"
            )
        if len(self.base_countries) != base.size or len(self.reference_countries) != reference.size:
            raise SampleMismatchError("country ids and emission vectors differ in length")
        if not self.sigma_t > 0:
            raise ParameterError(f"sigma_t must be > 0, got {self.sigma_t}")
        if not self.R_target > 0:
            raise ParameterError(f"R_target must be > 0, got {self.R_target}")

        base_countries, base = _sorted_by_emissions(self.base_countries, base)
        reference_countries, reference = _sorted_by_emissions(self.reference_countries, reference)
        object.__setattr__(self, "base_countries", base_countries)
        object.__setattr__(self, "base_emissions", base)
        object.__setattr__(self, "reference_countries", reference_countries)
        object.__setattr__(self, "reference_emissions", reference)

    @property
    def n(self) -> int:
        return int(self.base_emissions.size)

    @classmethod
    def from_panel(
        cls,
        panel: EmissionsPanel,
        base_year: int,
        reference_year: int,
        target_year: int,
        mu_t: float,
        sigma_t: float,
        R_target: float,
    ) -> "PolicyScenario":
        base_countries, base = cross_section(panel, base_year)
        reference_countries, reference = cross_section(panel, reference_year)
        return cls(
            base_year=int(base_year),
            reference_year=int(reference_year),
            target_year=int(target_year),
            base_countries=tuple(base_countries),
            base_emissions=base,
            reference_countries=tuple(reference_countries),
            reference_emissions=reference,
            mu_t=float(mu_t),
            sigma_t=float(sigma_t),
            R_target=float(R_target),
        )


@dataclass(frozen=True)
class PolicyResult:
    scenario: PolicyScenario
    targets: List[CountryTarget]
    R_achieved: float
    theil: float
    base_sigma: float
    delta_theil: float


def _positive_vector(values, name: str) -> np.ndarray:
    x = np.asarray(values, dtype=float).ravel()
    if x.size == 0:
        raise InsufficientDataError(f"{name}: empty vector")
    if np.any(~(x > 0)) or np.any(~np.isfinite(x)):
        raise ParameterError(f"{name}: all entries must be finite and > 0")
    return x


def _sorted_by_emissions(countries: Sequence[str], values: np.ndarray) -> Tuple[Tuple[str, ...], np.ndarray]:
    """Ascending emissions; ties broken by country id."""
    order = sorted(range(values.size), key=lambda i: (values[i], countries[i]))
    return tuple(countries[i] for i in order), values[order]


def plotting_scores(n: int) -> np.ndarray:
    """Phi^-1(i / (N+1)) for i = 1..N."""
    return special.ndtri(np.arange(1, n + 1) / (n + 1.0))


def lognormal_quantiles(mu_t: float, sigma_t: float, n: int) -> np.ndarray:
    return np.exp(mu_t + sigma_t * plotting_scores(n))


def _log_R(mu_t: float, sigma_t: float, base: np.ndarray) -> float:
    return mu_t + float(special.logsumexp(sigma_t * plotting_scores(base.size))) - np.log(base.sum())


def compute_R(mu_t: float, sigma_t: float, base_emissions) -> float:
    """Global ratio of target-year to base-year world emissions."""
    if not sigma_t > 0:
        raise ParameterError(f"sigma_t must be > 0, got {sigma_t}")
    base = _positive_vector(base_emissions, "base emissions")
    return float(np.exp(_log_R(mu_t, sigma_t, base)))


def solve_parameter(free: str, fixed_value: float, R_target: float, base_emissions) -> float:
    """Value of the free parameter (mu or sigma) that reaches R_target.

    mu has a closed form since R is proportional to e^mu; sigma is found by
    Brent's method on log R, which is increasing in sigma.
    """
    if not R_target > 0:
        raise ParameterError(f"R_target must be > 0, got {R_target}")
    base = _positive_vector(base_emissions, "base emissions")
    target = np.log(R_target)

    if free == "mu":
        sigma_t = float(fixed_value)
        if not sigma_t > 0:
            raise ParameterError(f"sigma_t must be > 0, got {sigma_t}")
        return float(target - _log_R(0.0, sigma_t, base))

    if free != "sigma":
        raise ValueError(f"free parameter must be 'mu' or 'sigma', got {free!r}")

    mu_t = float(fixed_value)

    def gap(sigma: float) -> float:
        return _log_R(mu_t, sigma, base) - target

    lower, upper = SIGMA_BRACKET
    f_lower, f_upper = gap(lower), gap(upper)
    expansions = 0
    while np.sign(f_lower) == np.sign(f_upper) and expansions < BRACKET_EXPANSIONS:
        expansions += 1
        lower, upper = lower / 10.0, upper * 2.0
        f_lower, f_upper = gap(lower), gap(upper)
        logger.debug("sigma bracket expanded to [%g, %g]", lower, upper)
    if f_lower == 0.0:
        return lower
    if f_upper == 0.0:
        return upper
    if np.sign(f_lower) == np.sign(f_upper):
        raise BracketError(lower, upper, float(np.exp(f_lower + target)), float(np.exp(f_upper + target)))

    return float(optimize.brentq(gap, lower, upper, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500))


def group_for(r_i: float, R_target: float) -> str:
    if r_i > 1.0:
        return LOW
    if r_i >= R_target:
        return MIDDLE
    return HIGH


def allocate_targets(scenario: PolicyScenario) -> List[CountryTarget]:
    """National ratios r_i = lognormal quantile / reference-year emissions, largest emitter first."""
    n = scenario.n
    allocated = lognormal_quantiles(scenario.mu_t, scenario.sigma_t, n)
    reference = scenario.reference_emissions
    targets = []
    for i in range(n):
        r_i = float(allocated[i] / reference[i])
        targets.append(
            CountryTarget(
                country=scenario.reference_countries[i],
                rank=n - i,
                reference_emissions=float(reference[i]),
                allocated_emissions=float(allocated[i]),
                r_i=r_i,
                group=group_for(r_i, scenario.R_target),
            )
        )
    targets.reverse()
    return targets


def inequality_index(sigma: float) -> float:
    """Theil index = mean log deviation = sigma^2 / 2 for a two-parameter lognormal."""
    if not sigma > 0:
        raise ParameterError(f"sigma must be > 0, got {sigma}")
    return sigma**2 / 2.0


def inequality_change(sigma_1: float, sigma_t: float) -> float:
    return inequality_index(sigma_t) - inequality_index(sigma_1)


def _normal_expectation(func, centre: float, log_weight=None) -> float:
    """E[exp(log_weight(Z)) func(Z)] for Z ~ N(0, 1) by quadrature on centre +/- 40.

    The weight is folded into the normal exponent so the integrand never forms 0 * inf.
    """
    def integrand(z):
        exponent = -0.5 * z * z + (0.0 if log_weight is None else log_weight(z))
        return np.exp(exponent) / np.sqrt(2.0 * np.pi) * func(z)

    options = dict(epsabs=1e-13, epsrel=1e-12, limit=200)
    left, _ = integrate.quad(integrand, centre - QUAD_HALF_WIDTH, centre, **options)
    right, _ = integrate.quad(integrand, centre, centre + QUAD_HALF_WIDTH, **options)
    return left + right


def theil_index_numeric(mu: float, sigma: float) -> float:
    """E[(X/m) log(X/m)] with m = E[X], X ~ LOG(mu, sigma), by quadrature on log X."""
    if not sigma > 0:
        raise ParameterError(f"sigma must be > 0, got {sigma}")
    log_m = mu + sigma**2 / 2.0

    def log_ratio(z):
        return mu + sigma * z - log_m

    # The integrand's mass sits around z = sigma.
    return _normal_expectation(log_ratio, sigma, log_weight=log_ratio)


def mean_log_deviation_numeric(mu: float, sigma: float) -> float:
    """-E[log(X/m)] with m = E[X], X ~ LOG(mu, sigma)."""
    if not sigma > 0:
        raise ParameterError(f"sigma must be > 0, got {sigma}")
    log_m = mu + sigma**2 / 2.0
    return -_normal_expectation(lambda z: mu + sigma * z - log_m, 0.0)


def run_scenario(
    panel: EmissionsPanel,
    base_year: int,
    reference_year: int,
    target_year: int,
    R_target: float,
    fix: str,
    fixed_value: float,
    base_sigma: Optional[float] = None,
) -> PolicyResult:
    """Solve the free parameter, allocate national targets and summarise the scenario.

    `fix` names the parameter held at `fixed_value`; the other one is solved.
    `base_sigma` (the base year's fitted sigma) feeds the inequality change.
    """
    if fix not in ("mu", "sigma"):
        raise ValueError(f"fix must be 'mu' or 'sigma', got {fix!r}")

    _, base = cross_section(panel, base_year)
    free = "sigma" if fix == "mu" else "mu"
    solved = solve_parameter(free, fixed_value, R_target, base)
    mu_t, sigma_t = (fixed_value, solved) if fix == "mu" else (solved, fixed_value)

    scenario = PolicyScenario.from_panel(
        panel, base_year, reference_year, target_year, mu_t, sigma_t, R_target
    )
    targets = allocate_targets(scenario)
    R_achieved = compute_R(mu_t, sigma_t, scenario.base_emissions)
    theil = inequality_index(sigma_t)
    delta = inequality_change(base_sigma, sigma_t) if base_sigma else float("nan")
    logger.info(
        "Scenario %s->%s: mu_t=%.4f sigma_t=%.4f R=%.4f", base_year, target_year, mu_t, sigma_t, R_achieved
    )
    return PolicyResult(
        scenario=scenario,
        targets=targets,
        R_achieved=R_achieved,
        theil=theil,
        base_sigma=float(base_sigma) if base_sigma else float("nan"),
        delta_theil=delta,
    )
