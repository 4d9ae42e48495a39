"""Linear time trends of the yearly lognormal parameters and their forecasts."""
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
import pandas as pd
import statsmodels.api as sm

from co2dist.errors import DegenerateRegressorError, InsufficientDataError
from co2dist.logic import fit, policy
from co2dist.logic.dist import ModelId
from co2dist.logic.ingest import EmissionsPanel, cross_section

logger = logging.getLogger(__name__)

RESPONSES = ("mu", "sigma")


@dataclass(frozen=True)
class TrendModel:
    """response = alpha + beta * year + u, with OLS and Newey-West standard errors."""

    response: str
    alpha: float
    beta: float
    se_alpha: float
    se_beta: float
    se_alpha_hac: float
    se_beta_hac: float
    hac_lag: int
    r_squared: float
    f_statistic: float
    f_p_value: float
    n: int
    first_year: int
    last_year: int

    def predict(self, year) -> float:
        return predict(self, year)


def newey_west_lag(n: int) -> int:
    """floor(4 (n/100)^(2/9))."""
    return int(math.floor(4.0 * (n / 100.0) ** (2.0 / 9.0)))


def fit_trend(
    years: Sequence[float],
    estimates: Sequence[float],
    response: str = "mu",
    hac_lag: Optional[int] = None,
) -> TrendModel:
    if response not in RESPONSES:
        raise ValueError(f"response must be one of {RESPONSES}, got {response!r}")

    t = np.asarray(years, dtype=float)
    y = np.asarray(estimates, dtype=float)
    if t.shape != y.shape:
        raise ValueError("years and estimates must have the same length")
    distinct = np.unique(t).size
    if distinct == 1 and t.size > 1:
        raise DegenerateRegressorError("year vector is constant")
    if distinct < 3:
        raise InsufficientDataError(f"need at least 3 distinct years, got {distinct}")

    lag = newey_west_lag(t.size) if hac_lag is None else int(hac_lag)
    if lag < 0:
        raise ValueError(f"HAC lag must be >= 0, got {lag}")

    design = sm.add_constant(t, has_constant="add")
    model = sm.OLS(y, design)
    ols = model.fit()
    # Lag 0 reports the ordinary OLS errors.
    hac = ols if lag == 0 else model.fit(cov_type="HAC", cov_kwds={"maxlags": lag, "use_correction": False})

    with np.errstate(divide="ignore", invalid="ignore"):
        f_statistic = float(ols.fvalue)
        f_p_value = float(ols.f_pvalue)
    if not np.isfinite(f_statistic):
        # Perfect fit.
        f_statistic, f_p_value = np.inf, 0.0

    return TrendModel(
        response=response,
        alpha=float(ols.params[0]),
        beta=float(ols.params[1]),
        se_alpha=float(ols.bse[0]),
        se_beta=float(ols.bse[1]),
        se_alpha_hac=float(hac.bse[0]),
        se_beta_hac=float(hac.bse[1]),
        hac_lag=lag,
        r_squared=float(np.clip(ols.rsquared, 0.0, 1.0)),
        f_statistic=f_statistic,
        f_p_value=f_p_value,
        n=int(t.size),
        first_year=int(t.min()),
        last_year=int(t.max()),
    )


def predict(model: TrendModel, year) -> float:
    return model.alpha + model.beta * float(year)


def lognormal_parameter_series(panel: EmissionsPanel, years: Optional[Iterable[int]] = None) -> pd.DataFrame:
    """Yearly LOG maximum-likelihood estimates and standard errors."""
    rows = []
    for year in panel.years if years is None else years:
        _, values = cross_section(panel, year)
        if values.size < 3:
            logger.warning("Skipping year %s: %d values", year, values.size)
            continue
        result = fit.fit_mle(ModelId.LOG, values)
        rows.append(
            {
                "year": int(year),
                "n": result.n,
                "mu": result.params.theta[0],
                "sigma": result.params.theta[1],
                "se_mu": result.se[0],
                "se_sigma": result.se[1],
            }
        )
    return pd.DataFrame(rows, columns=["year", "n", "mu", "sigma", "se_mu", "se_sigma"])


def fit_parameter_trends(series: pd.DataFrame, hac_lag: Optional[int] = None):
    """(mu trend, sigma trend) from the output of lognormal_parameter_series."""
    return (
        fit_trend(series["year"], series["mu"], "mu", hac_lag=hac_lag),
        fit_trend(series["year"], series["sigma"], "sigma", hac_lag=hac_lag),
    )


def forecast_table(
    mu_model: TrendModel,
    sigma_model: TrendModel,
    years: Iterable[int],
    base_emissions: Optional[Sequence[float]] = None,
) -> pd.DataFrame:
    """Predicted (mu_t, sigma_t) per year, plus the global ratio R when a base vector is given."""
    rows = []
    for year in years:
        mu_t = predict(mu_model, year)
        sigma_t = predict(sigma_model, year)
        row = {"year": int(year), "mu_t": mu_t, "sigma_t": sigma_t}
        if base_emissions is not None:
            row["R"] = policy.compute_R(mu_t, sigma_t, base_emissions) if sigma_t > 0 else np.nan
        rows.append(row)
    return pd.DataFrame(rows)
