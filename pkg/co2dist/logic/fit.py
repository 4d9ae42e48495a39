"""Maximum-likelihood fits, standard errors, information criteria and AIC ranking."""
import hashlib
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize
from statsmodels.tools.numdiff import approx_hess3

from co2dist.errors import (
    ConvergenceError,
    InsufficientDataError,
    ParameterError,
    SampleMismatchError,
)
from co2dist.logic import dist
from co2dist.logic.dist import ModelId, ParamVector

logger = logging.getLogger(__name__)

# Shape parameters are searched on (0, SHAPE_CAP]; reaching the cap sets the boundary flag.
SHAPE_CAP = 1e6
SHAPE_PARAMS = {"alpha", "beta"}
XATOL = 1e-10
FATOL = 1e-10
RESTARTS = 3
HESSIAN_STEP = 1e-5
CRITERIA = ("aic", "bic", "hqc")

BEST_FIT = "best_fit"
LITTLE_SUPPORT = "little_support"
NO_SUPPORT = "no_support"


@dataclass(frozen=True)
class FitResult:
    """One maximum-likelihood fit of one model to one sample."""

    model: ModelId
    params: ParamVector
    se: Tuple[float, ...]
    loglik: float
    aic: float
    bic: float
    hqc: float
    n: int
    converged: bool
    boundary: bool
    sample_id: str = field(repr=False, default="")

    def criterion(self, name: str) -> float:
        if name not in CRITERIA:
            raise ValueError(f"unknown information criterion {name!r}")
        return getattr(self, name)


@dataclass(frozen=True)
class RankEntry:
    model: ModelId
    value: float
    delta: float
    group: str
    boundary: bool


@dataclass(frozen=True)
class ModelRanking:
    """Delta = IC - IC_min per model, ordered best first."""

    criterion: str
    entries: Tuple[RankEntry, ...]

    @property
    def best(self) -> ModelId:
        return self.entries[0].model

    def group_of(self, model) -> str:
        return self.entry(model).group

    def entry(self, model) -> RankEntry:
        model = ModelId(model)
        for item in self.entries:
            if item.model is model:
                return item
        raise KeyError(model)


def sample_fingerprint(data: np.ndarray) -> str:
    """Order-independent identity of a sample."""
    ordered = np.sort(np.asarray(data, dtype=float))
    return hashlib.sha1(ordered.tobytes()).hexdigest()


def information_criteria(loglik: float, k: int, n: int) -> Tuple[float, float, float]:
    """(AIC, BIC, HQC) for a log-likelihood with k parameters on n observations."""
    deviance = -2.0 * loglik
    return (
        deviance + 2.0 * k,
        deviance + k * np.log(n),
        deviance + 2.0 * k * np.log(np.log(n)),
    )


def delta_group(delta: float) -> str:
    if delta <= 2.0:
        return BEST_FIT
    if delta <= 20.0:
        return LITTLE_SUPPORT
    return NO_SUPPORT


def _validate(data) -> np.ndarray:
    x = np.asarray(data, dtype=float).ravel()
    if x.size < 3:
        raise InsufficientDataError(f"need at least 3 observations, got {x.size}")
    if np.any(~(x > 0)) or np.any(~np.isfinite(x)):
        raise ParameterError("all data must be finite and > 0")
    return x


def _start_values(model: ModelId, x: np.ndarray) -> Tuple[float, ...]:
    """Moment-type starting points for the numeric fits."""
    mean = float(np.mean(x))
    var = float(np.var(x))
    logs = np.log(x)

    if model is ModelId.EXP:
        return (mean * 1.5,)
    if model is ModelId.LOG:
        return (float(np.median(logs)), 1.2 * float(np.std(logs)) + 1e-3)
    if model is ModelId.GAM:
        var = var if var > 0 else mean**2
        return (mean**2 / var, var / mean)
    if model is ModelId.FSK:
        # log X is logistic with location log(sigma) and scale 1/beta
        spread = float(np.std(logs)) * np.sqrt(3.0) / np.pi
        return (1.0 / spread if spread > 0 else 1.0, float(np.exp(np.mean(logs))))
    if model is ModelId.WEI:
        # log(-log S(x)) = alpha log x - alpha log sigma on the empirical survival
        ordered = np.sort(logs)
        surv = 1.0 - np.arange(1, x.size + 1) / (x.size + 1.0)
        slope, intercept = np.polyfit(ordered, np.log(-np.log(surv)), 1)
        if not slope > 0:
            return (1.0, mean)
        return (float(slope), float(np.exp(-intercept / slope)))
    # PA2: CV^2 = alpha / (alpha - 2) for alpha > 2
    cv2 = var / mean**2 if mean > 0 else 0.0
    alpha = 2.0 * cv2 / (cv2 - 1.0) if cv2 > 1.0 else 1.5
    return (alpha, mean * (alpha - 1.0) if alpha > 1.0 else mean * 0.5)


def _is_log_scaled(name: str) -> bool:
    return name != "mu"


def _to_theta(model: ModelId, z: np.ndarray) -> Tuple[float, ...]:
    theta = []
    for name, value in zip(dist.PARAM_NAMES[model], z):
        if not _is_log_scaled(name):
            theta.append(float(value))
        elif name in SHAPE_PARAMS:
            theta.append(float(np.exp(min(value, np.log(SHAPE_CAP)))))
        else:
            theta.append(float(np.exp(value)))
    return tuple(theta)


def _to_z(model: ModelId, theta: Sequence[float]) -> np.ndarray:
    return np.array(
        [np.log(v) if _is_log_scaled(name) else v for name, v in zip(dist.PARAM_NAMES[model], theta)]
    )


def _negative_loglik(model: ModelId, x: np.ndarray) -> Callable[[np.ndarray], float]:
    def objective(z: np.ndarray) -> float:
        try:
            params = ParamVector(model, _to_theta(model, z))
        except (ParameterError, OverflowError):
            return np.inf
        with np.errstate(all="ignore"):
            value = -dist.log_likelihood(params, x)
        return value if np.isfinite(value) else np.inf

    return objective


def _maximize(model: ModelId, x: np.ndarray) -> Tuple[Tuple[float, ...], bool]:
    """Nelder-Mead on the log-parameters; returns (theta, optimizer reported success)."""
    objective = _negative_loglik(model, x)
    z0 = _to_z(model, _start_values(model, x))
    options = {"xatol": XATOL, "fatol": FATOL, "maxiter": 20000, "maxfev": 40000}

    best = optimize.minimize(objective, z0, method="Nelder-Mead", options=options)
    rng = np.random.default_rng(0)
    attempt = 0
    while not best.success and attempt < RESTARTS:
        attempt += 1
        start = best.x + rng.normal(scale=0.1, size=best.x.size)
        logger.debug("%s: restart %d from %s (%s)", model, attempt, start, best.message)
        retry = optimize.minimize(objective, start, method="Nelder-Mead", options=options)
        if retry.success or retry.fun < best.fun:
            best = retry

    if not np.isfinite(best.fun):
        raise ConvergenceError(f"{model}: no finite likelihood after {RESTARTS} restarts: {best.message}")
    if not best.success:
        logger.warning("%s: optimizer did not converge after %d restarts: %s", model, RESTARTS, best.message)
    return _to_theta(model, best.x), bool(best.success)


def _standard_errors(params: ParamVector, x: np.ndarray) -> Tuple[float, ...]:
    """Square roots of the inverse observed information, by central differences."""
    theta = np.array(params.theta)
    model = params.model

    def loglik(t: np.ndarray) -> float:
        try:
            candidate = ParamVector(model, tuple(t))
        except ParameterError:
            return -np.inf
        with np.errstate(all="ignore"):
            return dist.log_likelihood(candidate, x)

    step = HESSIAN_STEP * (1.0 + np.abs(theta))
    hessian = approx_hess3(theta, loglik, epsilon=step)
    try:
        covariance = np.linalg.inv(-hessian)
    except np.linalg.LinAlgError:
        logger.warning("%s: singular observed information, standard errors unavailable", model)
        return tuple(np.nan for _ in theta)
    variances = np.diag(covariance)
    return tuple(float(np.sqrt(v)) if v > 0 else np.nan for v in variances)


def fit_mle(model, data, method: str = "auto") -> FitResult:
    """Fit one model by maximum likelihood.

    LOG and EXP use their closed forms unless `method="numeric"`; the other
    four models are always fitted numerically.
    """
    model = ModelId(model)
    x = _validate(data)
    n = x.size

    if method not in ("auto", "numeric"):
        raise ValueError(f"unknown fit method {method!r}")

    if method == "auto" and model is ModelId.LOG:
        logs = np.log(x)
        mu = float(np.mean(logs))
        theta = (mu, float(np.sqrt(np.mean((logs - mu) ** 2))))
        converged = True
    elif method == "auto" and model is ModelId.EXP:
        theta = (float(np.mean(x)),)
        converged = True
    else:
        theta, converged = _maximize(model, x)

    params = ParamVector(model, theta)
    boundary = any(
        name in SHAPE_PARAMS and value >= SHAPE_CAP * (1.0 - 1e-9)
        for name, value in params.named().items()
    )
    if boundary:
        logger.warning("%s: fit stopped at the parameter bound %g", model, SHAPE_CAP)

    loglik = dist.log_likelihood(params, x)
    aic, bic, hqc = information_criteria(loglik, dist.param_count(model), n)
    return FitResult(
        model=model,
        params=params,
        se=_standard_errors(params, x),
        loglik=float(loglik),
        aic=float(aic),
        bic=float(bic),
        hqc=float(hqc),
        n=n,
        converged=converged,
        boundary=boundary,
        sample_id=sample_fingerprint(x),
    )


def fit_all(data, models: Optional[Iterable] = None) -> Dict[ModelId, FitResult]:
    """Fit every candidate model to the same sample."""
    x = _validate(data)
    return {ModelId(m): fit_mle(m, x) for m in (models or list(ModelId))}


def rank_models(fits, criterion: str = "aic") -> ModelRanking:
    """Order fits by an information criterion and classify Delta into support groups."""
    fits = list(fits.values()) if isinstance(fits, dict) else list(fits)
    if not fits:
        raise InsufficientDataError("no fits to rank")
    if criterion not in CRITERIA:
        raise ValueError(f"unknown information criterion {criterion!r}")
    if len({f.sample_id for f in fits}) != 1 or len({f.n for f in fits}) != 1:
        raise SampleMismatchError("fits were computed on different samples")
    if len({f.model for f in fits}) != len(fits):
        raise SampleMismatchError("each model may appear only once in a ranking")
    stuck = [f.model.value for f in fits if not f.converged and not f.boundary]
    if stuck:
        raise ConvergenceError(f"fits did not converge: {', '.join(stuck)}")

    values = [f.criterion(criterion) for f in fits]
    minimum = min(values)
    order = sorted(range(len(fits)), key=lambda i: (values[i], fits[i].model.value))
    entries = tuple(
        RankEntry(
            model=fits[i].model,
            value=values[i],
            delta=values[i] - minimum,
            group=delta_group(values[i] - minimum),
            boundary=fits[i].boundary,
        )
        for i in order
    )
    return ModelRanking(criterion=criterion, entries=entries)


def information_criteria_agree(fits) -> bool:
    """True when AIC, BIC and HQC rank the same model first."""
    return len({rank_models(fits, c).best for c in CRITERIA}) == 1
