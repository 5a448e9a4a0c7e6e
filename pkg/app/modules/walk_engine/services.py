"""Initialization, stepping and observables of the vertex-reinforced walk"""
import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.core.config import settings
from app.core.exceptions import ConfigError, InvariantViolation, ScheduleError
from app.core.rng import UniformStream, make_generator
from app.modules.graph_model import services as graph_services
from app.modules.graph_model.models import GraphFamily, GraphTopology, VertexId
from app.modules.rate_analysis.models import CheckpointRecord
from app.modules.walk_engine import kernels
from app.modules.walk_engine.models import ScheduleSpec, WalkMetrics, WalkState
from app.modules.walk_engine.schedules import check_increment, schedule_code, validate_schedule

logger = logging.getLogger(__name__)

_EMPTY_TABLE = np.zeros(0, dtype=np.int64)

WeightsSpec = Union[None, int, Sequence[int]]
CheckpointSpec = Union[Sequence[int], Sequence[Tuple[int, int]]]


def default_start(g: GraphTopology) -> VertexId:
    """Interior vertex 1 (member 1 of class 1 on d-partite graphs)"""
    return g.vertices[0]


def _initial_weights(g: GraphTopology, initial_weights: WeightsSpec) -> np.ndarray:
    if initial_weights is None:
        weights = np.ones(g.n_vertices, dtype=np.int64)
    elif isinstance(initial_weights, (int, np.integer)):
        weights = np.full(g.n_vertices, int(initial_weights), dtype=np.int64)
    else:
        weights = np.array([int(z) for z in initial_weights], dtype=np.int64)
        if weights.shape[0] != g.n_vertices:
            raise ConfigError(
                f"initial_weights has {weights.shape[0]} entries, graph has {g.n_vertices} vertices"
            )
    if weights.min() < 1:
        raise ConfigError(f"initial weights must be positive integers, got {weights.tolist()}")
    return weights


def _default_xi_pair(g: GraphTopology) -> Tuple[int, int]:
    if g.family == GraphFamily.COMPLETE_LIKE:
        return 0, 1
    return g.interior_of_class(1)[0], g.interior_of_class(2)[0]


def init_walk(
    g: GraphTopology,
    initial_weights: WeightsSpec = None,
    start: Optional[VertexId] = None,
    seed: Optional[int] = None,
    schedule: Optional[ScheduleSpec] = None,
    observe: Optional[VertexId] = None,
    xi_from: Optional[int] = None,
    block: Optional[int] = None,
) -> WalkState:
    """
    Create a walk at time t0 = sum of initial weights.

    Args:
        g: graph the walk lives on
        initial_weights: None for all ones, an int for a constant, or one value per vertex
        start: interior start vertex, interior 1 by default
        seed: 64-bit seed, ``settings.DEFAULT_SEED`` by default
        schedule: special-vertex schedule for the modified walk
        observe: vertex whose excursions are tracked (defaults to the special
            vertex); requires the triangle
        xi_from: time from which the running min/max of xi_12 is tracked
        block: uniform block size override

    Returns:
        Fresh WalkState

    Raises:
        ConfigError: nonpositive weights, leaf or unknown start, excursion
            tracking off the triangle
        ScheduleError: schedule values break H(k+1) >= H(k) + 1
    """
    weights = _initial_weights(g, initial_weights)
    start = start or default_start(g)
    position = g.index_of(start)
    if start.is_leaf:
        raise ConfigError(f"walk must start at an interior vertex, got {start.label}")

    special = -1
    if schedule is not None:
        special = validate_schedule(g, schedule)

    observe = observe or (schedule.special if schedule is not None else None)
    observe_idx, observe_pair = -1, (-1, -1)
    tracker = np.full(8, -1, dtype=np.int64)
    max_m = settings.EXCURSION_MAX_M
    if observe is not None:
        if not g.is_triangle:
            raise ConfigError("excursion classification needs the triangle (d=3, no leaves)")
        observe_idx = g.index_of(observe)
        others = [idx for idx in range(3) if idx != observe_idx]
        observe_pair = (others[0], others[1])
        tracker[:3] = (observe_idx, others[0], others[1])
        tracker[3] = 1 if position == observe_idx else 0

    t0 = int(weights.sum())
    seed = settings.DEFAULT_SEED if seed is None else int(seed)
    stream = UniformStream(seed=seed, block=block or settings.UNIFORM_BLOCK)
    state = WalkState(
        topology=g,
        weights=weights,
        initial_weights=weights.copy(),
        position=position,
        t=t0,
        t0=t0,
        seed=seed,
        stream=stream,
        schedule=schedule,
        special=special,
        observe=observe_idx,
        observe_pair=observe_pair,
        tracker=tracker,
        excursion_hist=np.zeros((4, max_m + 1), dtype=np.int64),
        xi_pair=_default_xi_pair(g),
        xi_from=settings.XI_FROM if xi_from is None else int(xi_from),
    )
    logger.debug(
        f"Initialized {state.mode} walk: |V|={g.n_vertices}, t0={t0}, start={start.label}, seed={seed}"
    )
    return state


def _adaptive_visit(state: WalkState, xi_params: np.ndarray) -> None:
    """
    Take the pending step onto the special vertex and set Z(tau_k, s) = H(k).

    The hook sees the state at tau_k. If it fails, the step is rolled back so
    the state is exactly as before the visit.
    """
    saved = (
        state.position, state.t, state.stream.cursor, state.visit_count_special,
        state.tracker.copy(), state.excursion_hist.copy(),
    )
    state.position = state.special
    state.t += 1
    state.stream.cursor += 1
    state.visit_count_special += 1
    if state.tracker[0] >= 0:
        kernels.observe_excursion(state.tracker, state.excursion_hist, state.position)

    k = state.visit_count_special
    try:
        value = state.schedule.hook(state, k)
        try:
            h = int(value)
        except (TypeError, ValueError, OverflowError):
            raise ScheduleError(f"adaptive schedule returned non-integer H({k})={value!r}", k)
        if h != value:
            raise ScheduleError(f"adaptive schedule returned non-integer H({k})={value!r}", k)
        check_increment(k, h, state.last_h)
    except Exception:
        state.position, state.t, state.stream.cursor, state.visit_count_special = saved[:4]
        state.tracker[:] = saved[4]
        state.excursion_hist[:] = saved[5]
        raise
    state.weights[state.special] = h
    state.last_h = h
    kernels.observe_xi(state.weights, xi_params, state.t, state.xi_range)


def advance(state: WalkState, n_steps: int) -> WalkState:
    """
    Execute exactly ``n_steps`` transitions in place.

    On a schedule error the state stays at the last completed step.

    Raises:
        ScheduleError: table schedule exhausted or an H(k) breaks the increment rule
    """
    g = state.topology
    schedule = state.schedule
    mode = schedule_code(schedule)
    h0 = int(schedule.h0) if schedule is not None else 0
    c = int(schedule.c) if schedule is not None else 0
    table = (
        np.asarray(schedule.table, dtype=np.int64) if schedule is not None and schedule.table
        else _EMPTY_TABLE
    )
    xi_params = np.array([state.xi_pair[0], state.xi_pair[1], state.xi_from], dtype=np.int64)
    walker = np.empty(6, dtype=np.int64)

    remaining = int(n_steps)
    while remaining > 0:
        state.stream.ensure()
        walker[:] = (
            state.position, state.t, state.stream.cursor,
            state.special, state.visit_count_special, state.last_h,
        )
        done, status = kernels.advance(
            g.indptr, g.indices, state.weights, walker, remaining, state.stream.buffer,
            mode, h0, c, table, state.tracker, state.excursion_hist, xi_params, state.xi_range,
        )
        state.position = int(walker[0])
        state.t = int(walker[1])
        state.stream.cursor = int(walker[2])
        state.visit_count_special = int(walker[4])
        state.last_h = int(walker[5])
        remaining -= int(done)

        if status == kernels.STATUS_NEED_SCHEDULE:
            _adaptive_visit(state, xi_params)
            remaining -= 1
        elif status == kernels.STATUS_SCHEDULE_EXHAUSTED:
            k = state.visit_count_special + 1
            raise ScheduleError(f"schedule table has {len(schedule.table)} values; visit k={k} needs more", k)
        elif status == kernels.STATUS_SCHEDULE_VIOLATION:
            k = state.visit_count_special + 1
            check_increment(k, schedule.value(k), state.last_h)
    return state


def step(state: WalkState) -> WalkState:
    """
    One transition of the walk.

    From v the walk moves to neighbor w with probability
    Z(t,w) / sum_{y~v} Z(t,y); the new position gains one unit of weight,
    except the special vertex whose weight becomes H(k) on its k-th visit.
    """
    return advance(state, 1)


def _normalize_checkpoints(checkpoints: Optional[CheckpointSpec]) -> List[Tuple[int, int]]:
    if not checkpoints:
        return []
    plan = []
    for n, item in enumerate(checkpoints, start=1):
        if isinstance(item, (tuple, list)):
            plan.append((int(item[0]), int(item[1])))
        else:
            plan.append((n, int(item)))
    plan.sort(key=lambda kt: kt[1])
    for (_, previous), (k, t_k) in zip(plan, plan[1:]):
        if t_k == previous:
            raise ConfigError(f"checkpoint time t={t_k} is scheduled twice (k={k})")
    return plan


def _check_conservation(state: WalkState) -> None:
    if state.schedule is None:
        total = int(state.weights.sum())
        if total != state.t:
            raise InvariantViolation(f"sum of weights {total} != t={state.t}")


def run_to(
    state: WalkState,
    t_target: int,
    checkpoints: Optional[CheckpointSpec] = None,
    replica: int = 0,
) -> Tuple[WalkState, List[CheckpointRecord]]:
    """
    Run until ``t_target`` and capture a record at every scheduled time crossed.

    Args:
        state: walk to advance in place
        t_target: final time, >= state.t
        checkpoints: times, or (k, t) pairs; bare times are numbered from 1
        replica: replica index stamped on the records

    Returns:
        (state, records), records at scheduled s with state.t <= s <= t_target

    Raises:
        ConfigError: t_target below the current time, or a checkpoint time repeated
        InvariantViolation: weight conservation broken (only with DEBUG_CHECKS)
    """
    if t_target < state.t:
        raise ConfigError(f"t_target={t_target} is before the current time t={state.t}")

    records: List[CheckpointRecord] = []
    for k, t_k in _normalize_checkpoints(checkpoints):
        if t_k < state.t or t_k > t_target:
            continue
        advance(state, t_k - state.t)
        if settings.DEBUG_CHECKS:
            _check_conservation(state)
        records.append(to_checkpoint(snapshot_metrics(state), replica=replica, k=k))
        logger.debug(f"replica {replica}: checkpoint k={k} t={t_k}")

    advance(state, t_target - state.t)
    if settings.DEBUG_CHECKS:
        _check_conservation(state)
    return state, records


def snapshot_metrics(state: WalkState, g: Optional[GraphTopology] = None) -> WalkMetrics:
    """
    Occupation-measure observables at the current time.

    pi is Z(t,.)/t over the observed coordinates (every vertex on
    complete-like graphs, class and leaf-class totals on d-partite ones);
    eta = 1 - d * min_j Z(t,j) / t over interior totals.
    """
    g = g or state.topology
    t = state.t
    coords = graph_services.observed_coordinates(g, state.weights)
    pi = coords / t
    sup_dist = float(np.max(np.abs(pi - graph_services.uniform_target(g))))
    totals = graph_services.class_totals(g, state.weights)
    leaves = graph_services.leaf_totals(g, state.weights)
    eta = 1.0 - g.d * int(totals.min()) / t

    xi_L = xi_R = None
    if g.d == 2 and g.leaf_counts[0] >= 1 and g.leaf_counts[1] >= 1:
        xi_L = leaves[0] / (leaves[0] + totals[1])
        xi_R = leaves[1] / (leaves[1] + totals[0])

    xi_range = None
    if math.isfinite(state.xi_range[0]):
        xi_range = (float(state.xi_range[0]), float(state.xi_range[1]))

    return WalkMetrics(
        t=t,
        position=state.vertex.label,
        pi=tuple(float(x) for x in pi),
        sup_dist=sup_dist,
        eta=eta,
        totals=tuple(int(z) for z in totals),
        leaf_totals=tuple(int(z) for z in leaves),
        xi_L=None if xi_L is None else float(xi_L),
        xi_R=None if xi_R is None else float(xi_R),
        xi_range=xi_range,
    )


def to_checkpoint(metrics: WalkMetrics, replica: int, k: int) -> CheckpointRecord:
    return CheckpointRecord(
        replica=replica,
        k=k,
        t=metrics.t,
        pos=metrics.position,
        totals=metrics.totals,
        leaf_totals=metrics.leaf_totals,
        eta=metrics.eta,
        sup_dist=metrics.sup_dist,
        xi_12=metrics.xi(1, 2),
        Xi_12=metrics.Xi(1, 2),
        pi=metrics.pi,
    )


def within_class_ratio(state: WalkState, x: VertexId, y: VertexId) -> float:
    """
    Z(t,x) / Z(t,y) for two members of one d-partite class.

    Raises:
        ConfigError: x and y are not interior members of the same class
    """
    if x.is_leaf or y.is_leaf or x.interior_index != y.interior_index:
        raise ConfigError(f"{x.label} and {y.label} are not members of one class")
    g = state.topology
    return int(state.weights[g.index_of(x)]) / int(state.weights[g.index_of(y)])


def transition_probabilities(state: WalkState) -> Dict[VertexId, float]:
    """Law of the next position from the current state"""
    g = state.topology
    nbrs = g.adjacency[state.position]
    w = state.weights[list(nbrs)]
    total = int(w.sum())
    return {g.vertices[x]: int(z) / total for x, z in zip(nbrs, w)}


def sample_next_many(state: WalkState, n: int, seed: Optional[int] = None) -> Dict[VertexId, int]:
    """
    Draw the next position ``n`` times from the frozen state.

    Uses its own uniform stream (``seed`` or the walk seed) and leaves the
    state untouched.

    Returns:
        counts per neighbor
    """
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    g = state.topology
    generator = make_generator(state.seed if seed is None else seed)
    out = np.empty(n, dtype=np.int64)
    kernels.sample_many(g.indptr, g.indices, state.weights, state.position, generator.random(n), out)
    counts = np.bincount(out, minlength=g.n_vertices)
    return {g.vertices[x]: int(counts[x]) for x in g.adjacency[state.position]}
