"""
Excursions away from the observation vertex of the triangle.

With the observation (special) vertex s and the other two vertices called
first and second, an excursion starting at first is

- A_m: first is visited exactly m times and the walk returns to s from first,
- B_m: first is visited exactly m times and the walk returns to s from second,

and C_m is "first is visited at least m times". A-bar and B-bar are the same
events for excursions starting at second. During an excursion Z(s) = a
stays fixed while u, v are the weights of first and second when it starts.
"""
import logging
from collections import Counter
from typing import Dict, List, Sequence, Tuple

import numpy as np

from app.core.exceptions import ConfigError
from app.modules.walk_engine.models import (
    EXCURSION_CLASSES,
    ExcursionClass,
    ExcursionRecord,
    WalkState,
)

logger = logging.getLogger(__name__)

ExcursionHistogram = Dict[ExcursionClass, Dict[int, int]]

MODES = ("exact", "geometric")


def _check_inputs(u: int, v: int, a: int, m: int, mode: str) -> None:
    if min(u, v, a) < 1:
        raise ConfigError(f"u, v, a must be positive, got u={u}, v={v}, a={a}")
    if m < 1:
        raise ConfigError(f"m must be >= 1, got m={m}")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")


def _exact_tail(u: int, v: int, a: int, m: int) -> float:
    prob = u / (u + v)
    for j in range(m - 1):
        prob *= (v + j) / (v + j + a) * (u + j + 1) / (u + j + 1 + a)
    return prob


def excursion_tail_prob(u: int, v: int, a: int, m: int, mode: str = "exact") -> float:
    """
    P(C_m): an excursion starts at first and visits it at least m times.

    exact: u/(u+v) * prod_{j=0}^{m-2} (v+j)/(v+j+a) * (u+j+1)/(u+j+1+a)
    geometric: u/(u+v) * nu^(m-1), nu = (1 - lambda_u)(1 - lambda_v),
    lambda_x = a/(a+x)

    Raises:
        ConfigError: nonpositive weights, m < 1 or unknown mode
    """
    _check_inputs(u, v, a, m, mode)
    if mode == "exact":
        return _exact_tail(u, v, a, m)
    nu = (1 - a / (a + u)) * (1 - a / (a + v))
    return u / (u + v) * nu ** (m - 1)


def excursion_event_prob(
    u: int, v: int, a: int, m: int, event: ExcursionClass | str, mode: str = "exact"
) -> float:
    """
    Probability of A_m, B_m, A-bar_m or B-bar_m.

    In exact mode P(C_m) - P(C_{m+1}) = P(A_m) + P(B_m); the geometric forms
    keep that identity with the simplified tail.
    """
    _check_inputs(u, v, a, m, mode)
    event = ExcursionClass(event)
    if event in (ExcursionClass.A_BAR, ExcursionClass.B_BAR):
        u, v = v, u
    if mode == "exact":
        tail = _exact_tail(u, v, a, m)
        leave_first = a / (a + v + m - 1)
        if event in (ExcursionClass.A, ExcursionClass.A_BAR):
            return tail * leave_first
        return tail * (1 - leave_first) * a / (a + u + m)

    lam_u = a / (a + u)
    lam_v = a / (a + v)
    base = u / (u + v) * ((1 - lam_u) * (1 - lam_v)) ** (m - 1)
    if event in (ExcursionClass.A, ExcursionClass.A_BAR):
        return base * lam_v
    return base * (1 - lam_v) * lam_u


def _classify(start_first: bool, last_first: bool) -> ExcursionClass:
    if start_first:
        return ExcursionClass.A if last_first else ExcursionClass.B
    return ExcursionClass.B_BAR if last_first else ExcursionClass.A_BAR


def classify_excursions(
    path: Sequence[int], observe: int = 3, first: int = 1, second: int = 2
) -> Tuple[List[ExcursionRecord], ExcursionHistogram]:
    """
    Classify every completed excursion in a recorded position stream.

    Positions before the first visit to ``observe`` and an unfinished final
    excursion are ignored.

    Returns:
        (records, histogram) with histogram[class][m] = count
    """
    if len({observe, first, second}) != 3:
        raise ConfigError("observe, first and second must be three distinct vertices")
    records: List[ExcursionRecord] = []
    inside = False
    visits = {first: 0, second: 0}
    start = last = None
    for position in path:
        if position == observe:
            if inside and start is not None:
                records.append(
                    ExcursionRecord(
                        k=len(records) + 1,
                        start_vertex=1 if start == first else 2,
                        visits_to_1=visits[first],
                        visits_to_2=visits[second],
                        classification=_classify(start == first, last == first),
                    )
                )
            inside = True
            visits = {first: 0, second: 0}
            start = last = None
        elif inside:
            if position not in visits:
                raise ConfigError(f"position {position} is not a vertex of the triangle")
            if start is None:
                start = position
            visits[position] += 1
            last = position

    return records, _count(records)


def _count(records: List[ExcursionRecord]) -> ExcursionHistogram:
    grouped: Dict[ExcursionClass, Counter] = {cls: Counter() for cls in EXCURSION_CLASSES}
    for record in records:
        grouped[record.classification][record.m] += 1
    return {cls: dict(sorted(counter.items())) for cls, counter in grouped.items()}


def excursion_stats(state: WalkState) -> ExcursionHistogram:
    """
    Histogram of excursions completed so far, tracked online by the kernel.

    Shuttle counts m >= ``EXCURSION_MAX_M`` share the last bin.

    Raises:
        ConfigError: the walk has no observation vertex
    """
    if state.observe < 0:
        raise ConfigError("walk has no special or observation vertex; excursions are not tracked")
    histogram: ExcursionHistogram = {}
    for row, cls in enumerate(EXCURSION_CLASSES):
        ms = np.nonzero(state.excursion_hist[row])[0]
        histogram[cls] = {int(m): int(state.excursion_hist[row, m]) for m in ms}
    return histogram


def completed_excursions(histogram: ExcursionHistogram) -> int:
    return sum(sum(counts.values()) for counts in histogram.values())
