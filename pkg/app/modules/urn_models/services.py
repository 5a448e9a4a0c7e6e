"""Generalized and multi-color Polya urns"""
import logging
import math
from typing import Optional, Sequence

import numpy as np

from app.core.config import settings
from app.core.exceptions import ConfigError
from app.core.rng import UniformStream, make_generator
from app.modules.urn_models import kernels
from app.modules.urn_models.models import CouplingResult, MultiUrnState, UrnState, UrnTrajectory

logger = logging.getLogger(__name__)

STATISTICS = ("thurn1", "thurn2", "fraction")


def init_urn(x0: float, y0: float, a: float, b: float, c: float, d: float) -> UrnState:
    """
    Raises:
        ConfigError: negative counts or params, or X + Y = 0
    """
    if min(a, b, c, d) < 0:
        raise ConfigError(f"urn params must be >= 0, got a={a}, b={b}, c={c}, d={d}")
    if x0 < 0 or y0 < 0 or x0 + y0 <= 0:
        raise ConfigError(f"urn needs X, Y >= 0 with X + Y > 0, got X={x0}, Y={y0}")
    return UrnState(float(x0), float(y0), float(a), float(b), float(c), float(d), 0)


def urn_step(state: UrnState, rng: np.random.Generator) -> UrnState:
    """
    One draw: with probability X/(X+Y) add (a, b), otherwise add (c, d).

    Raises:
        ConfigError: X + Y = 0
    """
    total = state.X + state.Y
    if total <= 0:
        raise ConfigError("urn is empty (X + Y = 0)")
    if rng.random() * total < state.X:
        state.X += state.a
        state.Y += state.b
    else:
        state.X += state.c
        state.Y += state.d
    state.n += 1
    return state


def regime_statistic(state: UrnState, which: str) -> float:
    """
    Statistic whose limit identifies the urn regime.

    thurn1: log X / log Y (tends to a when a > d = 1, b = c = 0);
    thurn2: X / (c Y) - log Y (converges to a random limit when
    a = c = d = 1, b = 0); fraction: X / (X + Y).

    Raises:
        ConfigError: X, Y <= 1 for thurn1, Y <= 1 or c = 0 for thurn2
    """
    if which == "thurn1":
        if state.X <= 1 or state.Y <= 1:
            raise ConfigError(f"thurn1 statistic needs X, Y > 1, got X={state.X}, Y={state.Y}")
        return math.log(state.X) / math.log(state.Y)
    if which == "thurn2":
        if state.Y <= 1 or state.c <= 0:
            raise ConfigError(f"thurn2 statistic needs Y > 1 and c > 0, got Y={state.Y}, c={state.c}")
        return state.X / (state.c * state.Y) - math.log(state.Y)
    if which == "fraction":
        return urn_fraction(state)
    raise ConfigError(f"unknown statistic {which!r}; use one of {STATISTICS}")


def urn_fraction(state: UrnState) -> float:
    return state.X / (state.X + state.Y)


def friedman_target(a: float, b: float, c: float, d: float) -> float:
    """
    Limit (a-d)/((a-d)+b) of X/(X+Y) when a > d, b > 0, c = 0.

    Raises:
        ConfigError: params outside that regime
    """
    if not (a > d and b > 0 and c == 0):
        raise ConfigError(f"Friedman limit needs a > d, b > 0, c = 0; got a={a}, b={b}, c={c}, d={d}")
    return (a - d) / ((a - d) + b)


def loop_graph_ratio(state: UrnState) -> float:
    """Y_n log n / n; tends to a constant for the c = 1 urn"""
    if state.n < 2:
        raise ConfigError("loop-graph ratio needs n >= 2")
    return state.Y * math.log(state.n) / state.n


def _statistic_or_nan(state: UrnState, which: Optional[str]) -> float:
    if which is None:
        return math.nan
    try:
        return regime_statistic(state, which)
    except ConfigError:
        return math.nan


def run_urn(
    state: UrnState,
    steps: int,
    seed: Optional[int] = None,
    record_at: Optional[Sequence[int]] = None,
    which: Optional[str] = None,
    stream: Optional[UniformStream] = None,
) -> UrnTrajectory:
    """
    Advance the urn ``steps`` draws, recording counts at the given step counts.

    The statistic is nan where it is undefined (for example Y <= 1 early on).
    """
    if steps < 0:
        raise ConfigError(f"steps must be >= 0, got {steps}")
    if state.X + state.Y <= 0:
        raise ConfigError("urn is empty (X + Y = 0)")
    stream = stream or UniformStream(seed=settings.DEFAULT_SEED if seed is None else seed)
    target_n = state.n + steps
    recorded = {int(n) for n in (record_at or []) if state.n <= n <= target_n}
    marks = sorted(recorded | {target_n})

    trajectory = UrnTrajectory()
    xy = np.array([state.X, state.Y], dtype=np.float64)
    for mark in marks:
        while state.n < mark:
            stream.ensure()
            take = min(mark - state.n, stream.buffer.shape[0] - stream.cursor)
            kernels.urn_advance(
                xy, state.a, state.b, state.c, state.d,
                stream.buffer[stream.cursor:stream.cursor + take],
            )
            stream.cursor += take
            state.n += take
        state.X, state.Y = float(xy[0]), float(xy[1])
        if mark in recorded:
            trajectory.ns.append(mark)
            trajectory.X.append(state.X)
            trajectory.Y.append(state.Y)
            trajectory.stat.append(_statistic_or_nan(state, which))
    return trajectory


def init_multi_polya(d: int, balls: int = 1) -> MultiUrnState:
    """``balls`` balls of each of d colors, so t0 = d * balls"""
    if d < 2 or balls < 1:
        raise ConfigError(f"multi-color urn needs d >= 2 and >= 1 ball per color, got d={d}, balls={balls}")
    return MultiUrnState(counts=np.full(d, balls, dtype=np.int64))


def multi_polya_step(state: MultiUrnState, rng: np.random.Generator) -> MultiUrnState:
    """Draw color i with probability Pi_i / t and add one ball of it"""
    kernels.multi_polya_advance(state.counts, rng.random(1))
    return state


def run_multi_polya(state: MultiUrnState, steps: int, seed: Optional[int] = None) -> MultiUrnState:
    if steps < 0:
        raise ConfigError(f"steps must be >= 0, got {steps}")
    generator = make_generator(settings.DEFAULT_SEED if seed is None else seed)
    block = settings.UNIFORM_BLOCK
    remaining = steps
    while remaining > 0:
        take = min(block, remaining)
        kernels.multi_polya_advance(state.counts, generator.random(take))
        remaining -= take
    return state


def _color_count(state: MultiUrnState, i: int) -> int:
    if not 1 <= i <= state.d:
        raise ConfigError(f"color must be in [1, {state.d}], got {i}")
    return int(state.counts[i - 1])


def supermartingale_diag(state: MultiUrnState, i: int) -> float:
    """
    M_i(t) = log t - log(Pi_i(t) - 1), a nonnegative supermartingale.

    Raises:
        ConfigError: Pi_i < 2
    """
    count = _color_count(state, i)
    if count < 2:
        raise ConfigError(f"M_i(t) needs Pi_i >= 2, got Pi_{i}={count}")
    return math.log(state.t) - math.log(count - 1)


def supermartingale_drift(state: MultiUrnState, i: int) -> float:
    """E[M_i(t+1) - M_i(t) | F_t] = log(1 + 1/t) - (Pi_i/t) log(1 + 1/(Pi_i - 1)); never positive"""
    count = _color_count(state, i)
    if count < 2:
        raise ConfigError(f"M_i(t) needs Pi_i >= 2, got Pi_{i}={count}")
    t = state.t
    return math.log1p(1.0 / t) - count / t * math.log1p(1.0 / (count - 1))


def coupled_mvrrw_urn(
    steps: int,
    seed: Optional[int] = None,
    weights: Sequence[int] = (1, 1, 1),
    h0: int = 0,
    c: int = 2,
) -> CouplingResult:
    """
    Modified triangle walk with H(k) = h0 + c k, observed at its visits to
    {1, 2}, run on the same uniforms as the urn with a = c = d = 1, b = 0.

    X = U + V is shared; the walk's W must dominate the urn's second color
    on the whole path. The walk starts at vertex 1.

    Raises:
        ConfigError: nonpositive weights, c < 1, or H(1) <= W(0)
    """
    u0, v0, w0 = (int(z) for z in weights)
    if min(u0, v0, w0) < 1:
        raise ConfigError(f"weights must be positive, got {list(weights)}")
    if c < 1 or h0 + c < w0 + 1:
        raise ConfigError(f"coupling needs c >= 1 and H(1) >= W(0) + 1, got h0={h0}, c={c}, W(0)={w0}")
    if steps < 1:
        raise ConfigError(f"steps must be >= 1, got {steps}")

    generator = make_generator(settings.DEFAULT_SEED if seed is None else seed)
    state = np.array([u0, v0, w0, 0.0, 0.0, w0], dtype=np.float64)
    gap = np.empty(steps, dtype=np.float64)
    kernels.coupled_advance(state, float(h0), float(c), generator.random(2 * steps), gap)

    violations = np.nonzero(gap < 0)[0]
    first = int(violations[0]) + 1 if violations.size else None
    if first is not None:
        logger.warning(f"coupling dominance failed at step {first}")
    return CouplingResult(
        steps=steps,
        dominated=first is None,
        first_violation=first,
        min_gap=float(gap.min()),
        X=float(state[0] + state[1]),
        Y=float(state[2]),
        Y_prime=float(state[5]),
    )
