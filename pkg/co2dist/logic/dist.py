"""The six candidate size distributions on (0, inf).

Parameterisations:

    EXP (sigma)          F = 1 - exp(-x/sigma)
    FSK (beta, sigma)    F = 1 / (1 + (x/sigma)^-beta)
    GAM (beta, sigma)    F = P(beta, x/sigma), P the regularised lower incomplete gamma
    LOG (mu, sigma)      F = Phi((log x - mu) / sigma)
    PA2 (alpha, sigma)   F = 1 - (1 + x/sigma)^-alpha          (Lomax)
    WEI (alpha, sigma)   F = 1 - exp(-(x/sigma)^alpha)

Everything is vectorised over x / q and evaluated in log space where that
avoids underflow.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import special, stats

from co2dist.errors import ParameterError

LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)


class ModelId(str, Enum):
    EXP = "EXP"
    FSK = "FSK"
    GAM = "GAM"
    LOG = "LOG"
    PA2 = "PA2"
    WEI = "WEI"

    def __str__(self) -> str:
        return self.value


PARAM_NAMES: Dict[ModelId, Tuple[str, ...]] = {
    ModelId.EXP: ("sigma",),
    ModelId.FSK: ("beta", "sigma"),
    ModelId.GAM: ("beta", "sigma"),
    ModelId.LOG: ("mu", "sigma"),
    ModelId.PA2: ("alpha", "sigma"),
    ModelId.WEI: ("alpha", "sigma"),
}


def param_count(model: ModelId) -> int:
    return len(PARAM_NAMES[ModelId(model)])


@dataclass(frozen=True)
class ParamVector:
    """A model id and its parameters in the order of PARAM_NAMES."""

    model: ModelId
    theta: Tuple[float, ...]

    def __post_init__(self):
        model = ModelId(self.model)
        theta = tuple(float(v) for v in self.theta)
        names = PARAM_NAMES[model]
        if len(theta) != len(names):
            raise ParameterError(f"{model} takes {len(names)} parameters, got {len(theta)}")
        for name, value in zip(names, theta):
            if not np.isfinite(value):
                raise ParameterError(f"{model} {name} must be finite, got {value}")
            if name != "mu" and value <= 0:
                raise ParameterError(f"{model} {name} must be > 0, got {value}")
        object.__setattr__(self, "model", model)
        object.__setattr__(self, "theta", theta)

    @classmethod
    def from_sequence(cls, model, values: Sequence[float]) -> "ParamVector":
        return cls(ModelId(model), tuple(values))

    @property
    def names(self) -> Tuple[str, ...]:
        return PARAM_NAMES[self.model]

    def named(self) -> Dict[str, float]:
        return dict(zip(self.names, self.theta))

    def __getitem__(self, name: str) -> float:
        return self.named()[name]


def lognormal(mu: float, sigma: float) -> ParamVector:
    return ParamVector(ModelId.LOG, (mu, sigma))


def _positive(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise ParameterError("x must be > 0")
    return arr


def _probability(q) -> np.ndarray:
    arr = np.asarray(q, dtype=float)
    if np.any(~((arr > 0) & (arr < 1))):
        raise ParameterError("q must lie in (0, 1)")
    return arr


def _unwrap(value: np.ndarray):
    return float(value) if np.ndim(value) == 0 else value


# Per-model kernels. `x` is a validated positive array, `q` a probability array.

def _log_pdf(p: ParamVector, x: np.ndarray) -> np.ndarray:
    m, t = p.model, p.theta
    if m is ModelId.EXP:
        (sigma,) = t
        return -np.log(sigma) - x / sigma
    if m is ModelId.FSK:
        beta, sigma = t
        lz = np.log(x / sigma)
        return np.log(beta / sigma) + (beta - 1.0) * lz - 2.0 * np.logaddexp(0.0, beta * lz)
    if m is ModelId.GAM:
        beta, sigma = t
        z = x / sigma
        return -special.gammaln(beta) - np.log(sigma) + special.xlogy(beta - 1.0, z) - z
    if m is ModelId.LOG:
        mu, sigma = t
        lx = np.log(x)
        return -lx - np.log(sigma) - LOG_SQRT_2PI - (lx - mu) ** 2 / (2.0 * sigma**2)
    if m is ModelId.PA2:
        alpha, sigma = t
        return np.log(alpha / sigma) - (alpha + 1.0) * np.log1p(x / sigma)
    alpha, sigma = t
    lz = np.log(x / sigma)
    return np.log(alpha / sigma) + (alpha - 1.0) * lz - np.exp(alpha * lz)


def _cdf(p: ParamVector, x: np.ndarray) -> np.ndarray:
    m, t = p.model, p.theta
    if m is ModelId.EXP:
        return -np.expm1(-x / t[0])
    if m is ModelId.FSK:
        beta, sigma = t
        return special.expit(beta * np.log(x / sigma))
    if m is ModelId.GAM:
        beta, sigma = t
        return special.gammainc(beta, x / sigma)
    if m is ModelId.LOG:
        mu, sigma = t
        return special.ndtr((np.log(x) - mu) / sigma)
    if m is ModelId.PA2:
        alpha, sigma = t
        return -np.expm1(-alpha * np.log1p(x / sigma))
    alpha, sigma = t
    return -np.expm1(-((x / sigma) ** alpha))


def _survival(p: ParamVector, x: np.ndarray) -> np.ndarray:
    m, t = p.model, p.theta
    if m is ModelId.EXP:
        return np.exp(-x / t[0])
    if m is ModelId.FSK:
        beta, sigma = t
        return special.expit(-beta * np.log(x / sigma))
    if m is ModelId.GAM:
        beta, sigma = t
        return special.gammaincc(beta, x / sigma)
    if m is ModelId.LOG:
        mu, sigma = t
        return special.ndtr(-(np.log(x) - mu) / sigma)
    if m is ModelId.PA2:
        alpha, sigma = t
        return np.exp(-alpha * np.log1p(x / sigma))
    alpha, sigma = t
    return np.exp(-((x / sigma) ** alpha))


def _quantile(p: ParamVector, q: np.ndarray) -> np.ndarray:
    m, t = p.model, p.theta
    if m is ModelId.EXP:
        return -t[0] * np.log1p(-q)
    if m is ModelId.FSK:
        beta, sigma = t
        return sigma * np.exp((np.log(q) - np.log1p(-q)) / beta)
    if m is ModelId.GAM:
        beta, sigma = t
        z = special.gammaincinv(beta, q)
        # One Newton step on P(beta, z) = q tightens the inverse near the tails.
        log_density = -special.gammaln(beta) + special.xlogy(beta - 1.0, z) - z
        density = np.exp(log_density)
        usable = density > 0
        polished = z - (special.gammainc(beta, z) - q) / np.where(usable, density, 1.0)
        z = np.where(usable & (polished > 0), polished, z)
        return sigma * z
    if m is ModelId.LOG:
        mu, sigma = t
        return np.exp(mu + sigma * special.ndtri(q))
    if m is ModelId.PA2:
        alpha, sigma = t
        return sigma * np.expm1(-np.log1p(-q) / alpha)
    alpha, sigma = t
    return sigma * (-np.log1p(-q)) ** (1.0 / alpha)


def log_pdf(p: ParamVector, x):
    return _unwrap(_log_pdf(p, _positive(x)))


def pdf(p: ParamVector, x):
    return _unwrap(np.exp(_log_pdf(p, _positive(x))))


def cdf(p: ParamVector, x):
    return _unwrap(_cdf(p, _positive(x)))


def survival(p: ParamVector, x):
    """1 - cdf without cancellation in the upper tail."""
    return _unwrap(_survival(p, _positive(x)))


def quantile(p: ParamVector, q):
    return _unwrap(_quantile(p, _probability(q)))


def log_likelihood(p: ParamVector, data) -> float:
    return float(np.sum(_log_pdf(p, _positive(data))))


def uniforms(n: int, seed: Optional[int] = None, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """n uniforms on the open interval (0, 1)."""
    if n < 0:
        raise ParameterError(f"sample size must be >= 0, got {n}")
    rng = rng if rng is not None else np.random.default_rng(seed)
    u = rng.random(n)
    tiny = np.finfo(float).tiny
    return np.clip(u, tiny, 1.0 - np.finfo(float).epsneg)


def sample(
    p: ParamVector,
    n: int,
    seed: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """Inverse-transform sampling; the same seed gives the same uniforms for every model."""
    return _quantile(p, uniforms(n, seed=seed, rng=rng))


def to_scipy(p: ParamVector):
    """The equivalent frozen scipy.stats distribution."""
    m, t = p.model, p.theta
    if m is ModelId.EXP:
        return stats.expon(scale=t[0])
    if m is ModelId.FSK:
        return stats.fisk(t[0], scale=t[1])
    if m is ModelId.GAM:
        return stats.gamma(t[0], scale=t[1])
    if m is ModelId.LOG:
        return stats.lognorm(t[1], scale=np.exp(t[0]))
    if m is ModelId.PA2:
        return stats.lomax(t[0], scale=t[1])
    return stats.weibull_min(t[0], scale=t[1])
