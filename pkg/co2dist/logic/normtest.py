"""Seven normality tests applied to log-transformed cross-sections.

X is lognormal iff log X is normal, so every test here runs on log(data).
p-values follow the usual published approximations: Royston's AS R94 for
Shapiro-Wilk (scipy), Royston's transform for Shapiro-Francia,
Dallal-Wilkinson for Lilliefors (statsmodels), Stephens' case-3 formulas
for Cramer-von Mises and Anderson-Darling, D'Agostino's K^2 and the
asymptotic chi-square(2) for Jarque-Bera.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy import special, stats
from statsmodels.stats.diagnostic import lilliefors, normal_ad

from co2dist.errors import InsufficientDataError, ParameterError

logger = logging.getLogger(__name__)

ALPHAS = (0.05, 0.01)


class TestId(str, Enum):
    __test__ = False

    SW = "SW"
    SF = "SF"
    LL = "LL"
    CVM = "CVM"
    AD = "AD"
    DP = "DP"
    JB = "JB"

    def __str__(self) -> str:
        return self.value


# (minimum n, maximum n) per test
VALID_RANGE: Dict[TestId, Tuple[int, Optional[int]]] = {
    TestId.SW: (3, 5000),
    TestId.SF: (8, None),
    TestId.LL: (8, None),
    TestId.CVM: (8, None),
    TestId.AD: (8, None),
    TestId.DP: (20, None),
    TestId.JB: (8, None),
}


@dataclass(frozen=True)
class TestReport:
    __test__ = False

    test: TestId
    statistic: float
    p_value: float
    n: int

    @property
    def reject_05(self) -> bool:
        return self.p_value < 0.05

    @property
    def reject_01(self) -> bool:
        return self.p_value < 0.01

    def rejects(self, alpha: float) -> bool:
        return self.p_value < alpha


def colour_class(p_value: float) -> str:
    """white: p >= 0.05, yellow: 0.01 <= p < 0.05, red: p < 0.01."""
    if p_value < 0.01:
        return "red"
    if p_value < 0.05:
        return "yellow"
    return "white"


def _shapiro_wilk(y: np.ndarray) -> Tuple[float, float]:
    result = stats.shapiro(y)
    return float(result.statistic), float(result.pvalue)


def _shapiro_francia(y: np.ndarray) -> Tuple[float, float]:
    n = y.size
    ordered = np.sort(y)
    scores = special.ndtri((np.arange(1, n + 1) - 0.375) / (n + 0.25))
    w = float(np.corrcoef(ordered, scores)[0, 1] ** 2)
    if w >= 1.0:
        return 1.0, 1.0
    u = np.log(n)
    v = np.log(u)
    mu = -1.2725 + 1.0521 * (v - u)
    sig = 1.0308 - 0.26758 * (v + 2.0 / u)
    z = (np.log1p(-w) - mu) / sig
    return w, float(special.ndtr(-z))


def _lilliefors(y: np.ndarray) -> Tuple[float, float]:
    statistic, p_value = lilliefors(y, dist="norm", pvalmethod="approx")
    return float(statistic), float(p_value)


def _cramer_von_mises(y: np.ndarray) -> Tuple[float, float]:
    n = y.size
    ordered = np.sort(y)
    p = special.ndtr((ordered - ordered.mean()) / ordered.std(ddof=1))
    w = 1.0 / (12.0 * n) + float(np.sum((p - (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n)) ** 2))
    ww = (1.0 + 0.5 / n) * w
    if ww < 0.0275:
        p_value = 1.0 - np.exp(-13.953 + 775.5 * ww - 12542.61 * ww**2)
    elif ww < 0.051:
        p_value = 1.0 - np.exp(-5.903 + 179.546 * ww - 1515.29 * ww**2)
    elif ww < 0.092:
        p_value = np.exp(0.886 - 31.62 * ww + 10.897 * ww**2)
    elif ww < 1.1:
        p_value = np.exp(1.111 - 34.242 * ww + 12.832 * ww**2)
    else:
        p_value = 7.37e-10
    return w, float(np.clip(p_value, 0.0, 1.0))


def _anderson_darling(y: np.ndarray) -> Tuple[float, float]:
    statistic, p_value = normal_ad(y)
    return float(statistic), float(np.clip(p_value, 0.0, 1.0))


def _dagostino_pearson(y: np.ndarray) -> Tuple[float, float]:
    result = stats.normaltest(y)
    return float(result.statistic), float(result.pvalue)


def _jarque_bera(y: np.ndarray) -> Tuple[float, float]:
    n = y.size
    skewness = stats.skew(y, bias=True)
    kurtosis = stats.kurtosis(y, fisher=False, bias=True)
    statistic = n * (skewness**2 / 6.0 + (kurtosis - 3.0) ** 2 / 24.0)
    return float(statistic), float(stats.chi2.sf(statistic, df=2))


_IMPLEMENTATIONS: Dict[TestId, Callable[[np.ndarray], Tuple[float, float]]] = {
    TestId.SW: _shapiro_wilk,
    TestId.SF: _shapiro_francia,
    TestId.LL: _lilliefors,
    TestId.CVM: _cramer_von_mises,
    TestId.AD: _anderson_darling,
    TestId.DP: _dagostino_pearson,
    TestId.JB: _jarque_bera,
}


def in_valid_range(test, n: int) -> bool:
    low, high = VALID_RANGE[TestId(test)]
    return n >= low and (high is None or n <= high)


def _log_data(data) -> np.ndarray:
    x = np.asarray(data, dtype=float).ravel()
    if np.any(~(x > 0)) or np.any(~np.isfinite(x)):
        raise ParameterError("all data must be finite and > 0")
    return np.log(x)


def test_lognormality(test, data) -> TestReport:
    """Run one normality test on log(data)."""
    test = TestId(test)
    y = _log_data(data)
    if not in_valid_range(test, y.size):
        low, high = VALID_RANGE[test]
        bounds = f"{low}..{high}" if high else f">= {low}"
        raise InsufficientDataError(f"{test} needs n in {bounds}, got {y.size}")
    if np.ptp(y) == 0:
        raise InsufficientDataError(f"{test}: all values are identical")

    statistic, p_value = _IMPLEMENTATIONS[test](y)
    return TestReport(test=test, statistic=statistic, p_value=p_value, n=int(y.size))


# pytest would otherwise collect the public name as a test function
test_lognormality.__test__ = False


def test_all(data, tests=None) -> List[TestReport]:
    """The battery on one sample; tests whose n-range excludes the sample are skipped."""
    y_size = np.asarray(data).size
    reports = []
    for test in tests or list(TestId):
        if not in_valid_range(test, y_size):
            logger.debug("Skipping %s for n=%d", test, y_size)
            continue
        reports.append(test_lognormality(test, data))
    return reports


test_all.__test__ = False
