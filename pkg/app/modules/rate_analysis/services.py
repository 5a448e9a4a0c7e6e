"""Checkpoint schedules, exponent fits, the eta recursion and rate bands"""
import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats

from app.core.config import settings
from app.core.exceptions import ConfigError
from app.core.jit import njit
from app.core.rng import make_generator
from app.modules.rate_analysis.constants import (
    BRANCH_C,
    BRANCH_LOG,
    BRANCH_POWER,
    BRANCH_TIE_TOL,
    FORCING_EQUALITY,
    FORCING_INEQUALITY_MAX,
    VALID_FORCINGS,
)
from app.modules.rate_analysis.models import (
    Band,
    CheckpointRecord,
    FitResult,
    RecursionParams,
    RecursionResult,
)

logger = logging.getLogger(__name__)

ValueSelector = Union[str, Callable[[CheckpointRecord], float]]


def checkpoint_schedule(m: float, k_max: int) -> List[int]:
    """
    Checkpoint times t_k = round(k^m) for k = 1..k_max.

    Duplicates (possible for m close to 1) are dropped, so the result is
    strictly increasing.

    Raises:
        ConfigError: m <= 1 or k_max < 1
    """
    if m <= 1:
        raise ConfigError(f"checkpoint exponent m must be > 1, got m={m}")
    if k_max < 1:
        raise ConfigError(f"k_max must be >= 1, got {k_max}")
    times: List[int] = []
    for k in range(1, k_max + 1):
        t = int(round(k ** m))
        if not times or t > times[-1]:
            times.append(t)
    return times


def fit_power_exponent(points: Sequence[Tuple[float, float]]) -> FitResult:
    """
    Ordinary least squares of log(value) on log(t).

    Args:
        points: (t, value) pairs, at least 3, values > 0, t not all equal

    Returns:
        FitResult; ``residual`` is the root-mean-square residual in log space

    Raises:
        ConfigError: too few points, nonpositive values or degenerate t
    """
    if len(points) < 3:
        raise ConfigError(f"need at least 3 points for an exponent fit, got {len(points)}")
    t = np.array([p[0] for p in points], dtype=np.float64)
    values = np.array([p[1] for p in points], dtype=np.float64)
    if np.any(t <= 0) or np.any(values <= 0):
        raise ConfigError("exponent fit needs positive t and positive values")
    if np.unique(t).shape[0] < 2:
        raise ConfigError("exponent fit needs at least two distinct t")

    log_t = np.log(t)
    log_v = np.log(values)
    fit = stats.linregress(log_t, log_v)
    residuals = log_v - (fit.intercept + fit.slope * log_t)
    return FitResult(
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        residual=float(np.sqrt(np.mean(residuals ** 2))),
        n_points=len(points),
        stderr=float(fit.stderr),
    )


def _selector(value: ValueSelector) -> Callable[[CheckpointRecord], float]:
    if callable(value):
        return value
    return lambda record: float(getattr(record, value))


def _check_schedules(ensemble: Sequence[Sequence[CheckpointRecord]]) -> List[int]:
    if not ensemble:
        raise ConfigError("ensemble is empty")
    times = [r.t for r in ensemble[0]]
    for replica in ensemble[1:]:
        if [r.t for r in replica] != times:
            raise ConfigError("replicas do not share the same checkpoint schedule")
    return times


def quantile_curve(
    ensemble: Sequence[Sequence[CheckpointRecord]],
    value: ValueSelector,
    percents: Sequence[float],
) -> List[Tuple[int, List[float]]]:
    """
    Per-checkpoint quantiles across replicas.

    Uses numpy's ``method="lower"`` so every reported value is an observed one.
    """
    times = _check_schedules(ensemble)
    select = _selector(value)
    matrix = np.array([[select(r) for r in replica] for replica in ensemble], dtype=np.float64)
    q = np.percentile(matrix, percents, axis=0, method="lower")
    return [(t, [float(x) for x in q[:, i]]) for i, t in enumerate(times)]


def median_curve(
    ensemble: Sequence[Sequence[CheckpointRecord]],
    value: ValueSelector = "sup_dist",
) -> List[Tuple[int, float]]:
    """
    Per-checkpoint median across replicas (lower median for even counts).

    Raises:
        ConfigError: empty ensemble or mismatched schedules
    """
    return [(t, q[0]) for t, q in quantile_curve(ensemble, value, [50])]


def rate_branch(C: float, beta_tilde: float) -> str:
    """Which form of h(k) applies"""
    if abs(beta_tilde - C) <= BRANCH_TIE_TOL:
        return BRANCH_LOG
    return BRANCH_POWER if beta_tilde < C else BRANCH_C


def rate_function(k, C: float, beta_tilde: float):
    """
    h(k): k^beta if beta < C, k^beta / log k if beta = C, k^C if beta > C.

    The logarithmic form is undefined at k = 1 and gives nan there.
    """
    k = np.asarray(k, dtype=np.float64)
    branch = rate_branch(C, beta_tilde)
    if branch == BRANCH_POWER:
        return k ** beta_tilde
    if branch == BRANCH_C:
        return k ** C
    with np.errstate(divide="ignore", invalid="ignore"):
        log_k = np.log(k)
        return np.where(k > 1, k ** beta_tilde / np.where(k > 1, log_k, 1.0), np.nan)


def _validate_params(params: RecursionParams, K: int) -> None:
    if params.C <= 0 or params.D < 0:
        raise ConfigError(f"recursion needs C > 0 and D >= 0, got C={params.C}, D={params.D}")
    if not 0 <= params.beta_tilde <= 1:
        raise ConfigError(f"beta_tilde must be in [0, 1], got {params.beta_tilde}")
    if not 0 < params.epsilon < 1:
        raise ConfigError(f"epsilon must be in (0, 1), got {params.epsilon}")
    if not 0 <= params.eta0 <= 1 - params.epsilon:
        raise ConfigError(f"eta0 must be in [0, 1 - epsilon], got {params.eta0}")
    if params.k0 < 1:
        raise ConfigError(f"k0 must be >= 1, got {params.k0}")
    if K <= params.k0:
        raise ConfigError(f"K must exceed k0={params.k0}, got K={K}")


@njit
def iterate_recursion(C, D, beta, upper, eta0, k0, scale, out):
    """
    Fill ``out`` with eta_{k0}, eta_{k0+1}, ... clamped to [0, upper].

    The forcing at step k is scale[k - k0] * D / k^(1 + beta).

    Returns:
        number of steps where the clamp was active
    """
    eta = eta0
    out[0] = eta
    clamps = 0
    for i in range(out.shape[0] - 1):
        k = k0 + i
        nxt = eta * (1.0 - C * (1.0 - eta) / k) + scale[i] * D / k ** (1.0 + beta)
        if nxt < 0.0:
            nxt = 0.0
            clamps += 1
        elif nxt > upper:
            nxt = upper
            clamps += 1
        eta = nxt
        out[i + 1] = eta
    return clamps


def recursion_iterate(
    params: RecursionParams,
    K: int,
    forcing: str = FORCING_EQUALITY,
    seed: Optional[int] = None,
) -> RecursionResult:
    """
    Iterate the extremal eta sequence from k0 to K.

    eta_{k+1} = clamp(eta_k [1 - C (1 - eta_k) / k] + D / k^(1+beta), 0, 1 - eps)

    In ``inequality_max`` mode a second sequence with the forcing multiplied
    by U_k ~ U[0, 1] is co-iterated from the same start; the result carries
    its maximum excess over the extremal sequence.

    Raises:
        ConfigError: invalid params, K <= k0 or unknown forcing
    """
    _validate_params(params, K)
    if forcing not in VALID_FORCINGS:
        raise ConfigError(f"forcing must be one of {VALID_FORCINGS}, got {forcing!r}")

    n = K - params.k0 + 1
    upper = 1.0 - params.epsilon
    eta = np.empty(n, dtype=np.float64)
    clamps = iterate_recursion(
        float(params.C), float(params.D), float(params.beta_tilde), upper,
        float(params.eta0), int(params.k0), np.ones(n - 1), eta,
    )
    if clamps:
        logger.warning(f"eta recursion clamped to [0, {upper}] on {clamps} steps")

    ks = np.arange(params.k0, K + 1, dtype=np.float64)
    scaled = eta * rate_function(ks, params.C, params.beta_tilde)
    result = RecursionResult(
        params=params,
        K=K,
        eta=eta,
        scaled=scaled,
        sup=float(np.nanmax(scaled)) if np.any(~np.isnan(scaled)) else 0.0,
        branch=rate_branch(params.C, params.beta_tilde),
        clamp_count=int(clamps),
    )

    if forcing == FORCING_INEQUALITY_MAX:
        generator = make_generator(settings.DEFAULT_SEED if seed is None else seed)
        sub = np.empty(n, dtype=np.float64)
        iterate_recursion(
            float(params.C), float(params.D), float(params.beta_tilde), upper,
            float(params.eta0), int(params.k0), generator.random(n - 1), sub,
        )
        result.sub_forced = sub
        result.excess = float(np.max(sub - eta))
    return result


def window_sup(result: RecursionResult, k_lo: int, k_hi: int) -> float:
    """sup of eta_k h(k) over k_lo <= k <= k_hi"""
    lo = max(k_lo, result.params.k0) - result.params.k0
    hi = min(k_hi, result.K) - result.params.k0
    if hi < lo:
        raise ConfigError(f"window [{k_lo}, {k_hi}] is outside [{result.params.k0}, {result.K}]")
    return float(np.nanmax(result.scaled[lo:hi + 1]))


def theorem2_band(d: int, has_leaf: bool) -> Band:
    """
    Decay exponents bracketing the distance to uniform.

    The distance decays at least as fast as t^-upper with upper = 1/3 for
    d in {3, 4} and 1/(d-1) for d >= 5; with a leaf it decays no faster than
    t^-lower, lower = (d-2)/(d-1).

    Raises:
        ConfigError: d < 3
    """
    if d < 3:
        raise ConfigError(f"rate band needs d >= 3, got d={d}")
    upper = 1.0 / 3.0 if d <= 4 else 1.0 / (d - 1)
    lower = (d - 2) / (d - 1) if has_leaf else None
    return Band(d=d, upper=upper, lower=lower)


def leaf_exponent_target(d: int) -> float:
    """Growth exponent 1/(d-1) of the cumulative leaf weight"""
    if d < 3:
        raise ConfigError(f"leaf exponent needs d >= 3, got d={d}")
    return 1.0 / (d - 1)


def theorem2_recursion_params(d: int, delta1: float = 0.0) -> Dict[str, float]:
    """
    Recursion constants behind the upper band and the exponent they imply.

    C = 3/(d-1), beta_tilde = min(1 - delta1, 1), m = 3 + 2 delta1; the
    t-exponent is the exponent of h divided by m.
    """
    if d < 3:
        raise ConfigError(f"d must be >= 3, got d={d}")
    if not 0 <= delta1 < 1:
        raise ConfigError(f"delta1 must be in [0, 1), got {delta1}")
    C = 3.0 / (d - 1)
    beta_tilde = min(1.0 - delta1, 1.0)
    m = 3.0 + 2.0 * delta1
    branch = rate_branch(C, beta_tilde)
    h_exponent = C if branch == BRANCH_C else beta_tilde
    return {
        "C": C,
        "beta_tilde": beta_tilde,
        "m": m,
        "branch": branch,
        "h_exponent": h_exponent,
        "t_exponent": h_exponent / m,
    }


def band_verdict(slope: float, band: Band, slack: Optional[float] = None) -> Dict[str, Optional[bool]]:
    """
    Compare a fitted log-log slope of the distance with the band.

    upper holds when slope <= -upper + slack; lower holds when
    slope >= -lower - slack (None without a lower exponent).
    """
    slack = settings.BAND_SLACK if slack is None else slack
    lower = None if band.lower is None else bool(slope >= -band.lower - slack)
    return {"upper": bool(slope <= -band.upper + slack), "lower": lower}


def leaf_verdict(slope: float, d: int, slack: Optional[float] = None) -> bool:
    """Fitted leaf-weight slope within ``slack`` of 1/(d-1)"""
    slack = settings.LEAF_SLACK if slack is None else slack
    return bool(abs(slope - leaf_exponent_target(d)) <= slack)
