"""Entropy, Chernoff bounds and block-concentration checks (natural log throughout)"""
import logging
import math
from typing import List, Optional, Sequence

import numpy as np
from scipy.stats import binom

from app.core.config import settings
from app.core.exceptions import ConfigError
from app.modules.ld_tools.models import ChernoffRow, EntropyApproximation, FrozenPrediction

logger = logging.getLogger(__name__)

SIDES = ("upper", "lower")

# slack for thresholds a = k/n that equal p up to rounding
_SIDE_TOL = 1e-12


def _check_open_unit(name: str, value: float) -> None:
    if not 0.0 < value < 1.0:
        raise ConfigError(f"{name} must be in (0, 1), got {value}")


def entropy(a: float, p: float) -> float:
    """
    H(a, p) = a log(a/p) + (1-a) log((1-a)/(1-p)).

    Nonnegative, zero exactly when a = p.

    Raises:
        ConfigError: a or p outside (0, 1)
    """
    _check_open_unit("a", a)
    _check_open_unit("p", p)
    return a * math.log(a / p) + (1.0 - a) * math.log((1.0 - a) / (1.0 - p))


def _check_side(p: float, a: float, side: str) -> None:
    if side not in SIDES:
        raise ConfigError(f"side must be one of {SIDES}, got {side!r}")
    if side == "upper" and a < p - _SIDE_TOL:
        raise ConfigError(f"upper bound needs a >= p, got a={a}, p={p}")
    if side == "lower" and a > p + _SIDE_TOL:
        raise ConfigError(f"lower bound needs a <= p, got a={a}, p={p}")


def chernoff_bound(n: int, p: float, a: float, side: str = "upper") -> float:
    """
    exp(-n H(a, p)), bounding P(mean >= a) (upper) or P(mean <= a) (lower)
    for the mean of n Bernoulli(p) variables.

    Raises:
        ConfigError: n < 1, a on the wrong side of p, or a, p outside (0, 1)
    """
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    _check_side(p, a, side)
    return math.exp(-n * entropy(a, p))


def exact_binomial_tail(n: int, p: float, a: float, side: str = "upper") -> float:
    """P(S_n >= n a) for side upper, P(S_n <= n a) for side lower, S_n ~ Bin(n, p)"""
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    if side not in SIDES:
        raise ConfigError(f"side must be one of {SIDES}, got {side!r}")
    if side == "upper":
        k_min = math.ceil(n * a - 1e-9)
        return float(binom.sf(k_min - 1, n, p))
    k_max = math.floor(n * a + 1e-9)
    return float(binom.cdf(k_max, n, p))


def chernoff_table(n: int, p: float) -> List[ChernoffRow]:
    """
    Bound and exact tail for every valid threshold a = k/n on both sides.

    upper: p <= k/n < 1; lower: 0 < k/n <= p.
    """
    _check_open_unit("p", p)
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    rows: List[ChernoffRow] = []
    for k in range(1, n):
        a = k / n
        for side in SIDES:
            if (side == "upper" and a < p - _SIDE_TOL) or (side == "lower" and a > p + _SIDE_TOL):
                continue
            rows.append(
                ChernoffRow(
                    n=n,
                    p=p,
                    k=k,
                    a=a,
                    side=side,
                    bound=chernoff_bound(n, p, a, side),
                    exact_tail=exact_binomial_tail(n, p, a, side),
                )
            )
    return rows


def entropy_approx_check(a: float, p: float, extended: bool = False) -> EntropyApproximation:
    """
    H(a, p) against delta^2 / (2 p (1-p)), delta = a - p.

    The relative gap |exact - approx| / approx is flagged when it exceeds
    ``settings.SMALL_DELTA_TOL``. With ``extended`` the small-p form
    p (r log r - r + 1), r = a/p, is also returned.
    """
    exact = entropy(a, p)
    delta = a - p
    approx = delta * delta / (2.0 * p * (1.0 - p))
    gap = abs(exact - approx) / approx if approx > 0 else 0.0
    small_p = None
    if extended:
        r = a / p
        small_p = p * (r * math.log(r) - r + 1.0)
    return EntropyApproximation(
        exact=exact,
        quadratic_approx=approx,
        relative_gap=gap,
        outside_small_delta=gap > settings.SMALL_DELTA_TOL,
        small_p_approx=small_p,
    )


def frozen_prediction(alpha: Sequence[float], N_k: float) -> FrozenPrediction:
    """
    Visit shares over a block of N_k steps if weights stayed at alpha.

    Raises:
        ConfigError: nonpositive alpha, sum above 1, or all alpha_i in {0, 1}
    """
    alpha_arr = np.asarray(alpha, dtype=np.float64)
    if alpha_arr.size == 0 or np.any(alpha_arr <= 0):
        raise ConfigError(f"alpha entries must be positive, got {list(alpha)}")
    total = float(alpha_arr.sum())
    if total > 1.0 + 1e-12:
        raise ConfigError(f"alpha must sum to at most 1, got {total}")
    raw = alpha_arr * (1.0 - alpha_arr)
    denom = float(raw.sum())
    if denom <= 0:
        raise ConfigError("frozen prediction undefined: every alpha_i is 0 or 1")
    shares = raw / denom
    return FrozenPrediction(
        shares=tuple(float(s) for s in shares),
        expected_counts=tuple(float(s * N_k) for s in shares),
        theta=max(0.0, 1.0 - total),
    )


def ek_threshold(k: int, m: float, nu: Optional[float] = None) -> float:
    """k^((m-1)/2 + nu)"""
    nu = settings.DEFAULT_NU if nu is None else nu
    if nu <= 0:
        raise ConfigError(f"nu must be > 0, got {nu}")
    if m <= 1:
        raise ConfigError(f"m must be > 1, got {m}")
    return float(k) ** ((m - 1.0) / 2.0 + nu)


def ek_check(
    observed: Sequence[float],
    predicted: Sequence[float],
    k: int,
    m: Optional[float] = None,
    nu: Optional[float] = None,
) -> bool:
    """
    Whether every block count is within k^((m-1)/2 + nu) of its prediction.

    Raises:
        ConfigError: length mismatch, nu <= 0 or m <= 1
    """
    if len(observed) != len(predicted):
        raise ConfigError(f"observed has {len(observed)} entries, predicted has {len(predicted)}")
    if not observed:
        raise ConfigError("observed and predicted are empty")
    m = settings.DEFAULT_M if m is None else m
    threshold = ek_threshold(k, m, nu)
    deviation = float(np.max(np.abs(np.asarray(observed, float) - np.asarray(predicted, float))))
    return deviation <= threshold
