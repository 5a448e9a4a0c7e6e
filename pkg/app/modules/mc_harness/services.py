"""Ensemble orchestration: replicas, persistence and aggregation"""
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from app.core.config import settings
from app.core.exceptions import ConfigError
from app.core.rng import UniformStream, derive_seed
from app.modules.graph_model.models import GraphFamily, GraphTopology
from app.modules.graph_model.schemas import GraphSpec
from app.modules.graph_model.services import build_from_spec, parse_vertex
from app.modules.mc_harness import storage
from app.modules.mc_harness.schemas import (
    EnsembleConfig,
    EnsembleReport,
    FitSummary,
    QuantileRow,
    ReplicaSummary,
    ReportStatistics,
    UrnQuantileRow,
)
from app.modules.rate_analysis.constants import REPORT_QUANTILES
from app.modules.rate_analysis.models import CheckpointRecord
from app.modules.rate_analysis.services import (
    band_verdict,
    fit_power_exponent,
    leaf_verdict,
    median_curve,
    quantile_curve,
    theorem2_band,
)
from app.modules.urn_models.services import init_urn, run_urn, urn_fraction
from app.modules.walk_engine.excursions import excursion_stats
from app.modules.walk_engine.services import init_walk, run_to, snapshot_metrics

logger = logging.getLogger(__name__)


def checkpoint_plan(m: float, k_max: Optional[int], t0: int, t_max: int) -> List[Tuple[int, int]]:
    """
    (k, t_k) pairs with t0 <= t_k = round(k^m) <= t_max, ending at t_max.

    When t_max is not itself a schedule time it is appended with k one past
    the last schedule index at or below t_max. Without ``k_max`` the
    schedule runs until it passes t_max.

    Raises:
        ConfigError: m <= 1 or t_max < t0
    """
    if m <= 1:
        raise ConfigError(f"checkpoint exponent m must be > 1, got m={m}")
    if t_max < t0:
        raise ConfigError(f"horizon t_max={t_max} is below t0={t0}")
    if k_max is None:
        k_max = int(math.floor(t_max ** (1.0 / m))) + 1

    plan: List[Tuple[int, int]] = []
    last_k, last_t = 0, 0
    for k in range(1, k_max + 1):
        t = int(round(k ** m))
        if t > t_max:
            break
        if t <= last_t:
            continue
        last_k, last_t = k, t
        if t >= t0:
            plan.append((k, t))
    if not plan or plan[-1][1] != t_max:
        plan.append((last_k + 1, t_max))
    return plan


def resolve_workers(requested: Optional[int], replicas: int) -> int:
    workers = requested or settings.WORKERS or os.cpu_count() or 1
    return max(1, min(workers, replicas))


def _build_walk(config: EnsembleConfig, topology: GraphTopology, replica: int):
    seed = derive_seed(config.base_seed, replica)
    schedule = config.schedule.to_spec() if config.schedule else None
    state = init_walk(
        topology,
        initial_weights=config.initial_weights,
        start=parse_vertex(config.start) if config.start else None,
        seed=seed,
        schedule=schedule,
        observe=schedule.special if schedule is not None and topology.is_triangle else None,
        xi_from=config.xi_from,
    )
    return seed, state


def run_replica(config_data: Dict[str, Any], replica: int) -> Dict[str, Any]:
    """
    Run and persist one replica.

    Module-level so a process pool can pickle it; the config travels as a
    plain dict.
    """
    config = EnsembleConfig.model_validate(config_data)
    topology = build_from_spec(config.graph)
    started = time.perf_counter()
    seed, state = _build_walk(config, topology, replica)
    plan = checkpoint_plan(config.m, config.k_max, state.t0, config.t_max)
    state, records = run_to(state, config.t_max, plan, replica=replica)
    seconds = time.perf_counter() - started

    path = storage.write_records(storage.records_path(Path(config.out_dir), replica), records, topology.d)
    metrics = snapshot_metrics(state)
    excursions = None
    if state.observe >= 0:
        excursions = {cls.value: counts for cls, counts in excursion_stats(state).items()}
    logger.debug(f"replica {replica}: {state.steps} steps in {seconds:.3f}s -> {path}")
    summary = ReplicaSummary(
        replica=replica,
        seed=seed,
        steps=state.steps,
        seconds=seconds,
        special_visits=state.visit_count_special,
        xi_range=list(metrics.xi_range) if metrics.xi_range else None,
        xi_L=metrics.xi_L,
        xi_R=metrics.xi_R,
        excursions=excursions,
    )
    return {"records": records, "summary": summary, "path": str(path)}


def _execute(
    worker,
    config: EnsembleConfig,
    progress: bool,
) -> List[Dict[str, Any]]:
    workers = resolve_workers(config.workers, config.replicas)
    config_data = config.model_dump(mode="json")
    indices = range(config.replicas)
    bar = tqdm(total=config.replicas, desc=f"{config.mode} replicas", disable=not progress)
    results: List[Dict[str, Any]] = []
    try:
        if workers == 1:
            for i in indices:
                results.append(worker(config_data, i))
                bar.update(1)
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for result in pool.map(worker, [config_data] * config.replicas, indices):
                    results.append(result)
                    bar.update(1)
    finally:
        bar.close()
    return results


def _fit_summary(points: List[Tuple[int, float]], name: str) -> Optional[FitSummary]:
    points = [(t, v) for t, v in points if v > 0]
    if len(points) < 3:
        logger.warning(f"Not enough positive checkpoints after burn-in to fit {name} ({len(points)})")
        return None
    fit = fit_power_exponent(points)
    return FitSummary(**fit.__dict__)


def build_statistics(
    ensemble: Sequence[Sequence[CheckpointRecord]],
    d: int,
    has_leaf: bool,
    family: str = GraphFamily.COMPLETE_LIKE.value,
    burn_in: Optional[int] = None,
    mode: str = "vrrw",
) -> ReportStatistics:
    """
    Quantiles, fits and verdicts from per-replica record streams.

    Replicas are ordered by index first, so the result does not depend on
    completion order.
    """
    if not ensemble or not any(ensemble):
        raise ConfigError("no checkpoint records to aggregate")
    burn_in = settings.BURN_IN_T if burn_in is None else burn_in
    ensemble = sorted(ensemble, key=lambda records: records[0].replica if records else -1)
    percents = list(REPORT_QUANTILES)

    sup_q = quantile_curve(ensemble, "sup_dist", percents)
    eta_q = quantile_curve(ensemble, "eta", percents)
    leaf_q = quantile_curve(ensemble, "leaf_total", percents)
    ks = [r.k for r in ensemble[0]]
    checkpoints = [
        QuantileRow(k=k, t=t, sup_dist=s, eta=e, leaf_total=lq)
        for k, (t, s), (_, e), (_, lq) in zip(ks, sup_q, eta_q, leaf_q)
    ]

    late = [[r for r in replica if r.t >= burn_in] for replica in ensemble]
    stats = ReportStatistics(
        family=family,
        d=d,
        has_leaf=has_leaf,
        replicas=len(ensemble),
        quantiles=percents,
        burn_in=burn_in,
        checkpoints=checkpoints,
    )
    if late[0]:
        stats.slope_sup_dist = _fit_summary(median_curve(late, "sup_dist"), "sup_dist")
        stats.slope_eta = _fit_summary(median_curve(late, "eta"), "eta")
        if has_leaf:
            stats.slope_leaf = _fit_summary(median_curve(late, "leaf_total"), "leaf total")

    if d < 3:
        stats.flags.append("d=2: outside the d >= 3 rate theorems; no band")
    elif family != GraphFamily.COMPLETE_LIKE.value:
        stats.flags.append("d-partite graph: band stated for complete-like graphs only")
    elif mode == "mvrrw":
        stats.flags.append("mvrrw: band stated for the unmodified walk only")
    else:
        band = theorem2_band(d, has_leaf)
        stats.band = {"upper": band.upper, "lower": band.lower}
        if stats.slope_sup_dist is not None:
            stats.verdict = band_verdict(stats.slope_sup_dist.slope, band)
        if stats.slope_leaf is not None:
            stats.verdict["leaf"] = leaf_verdict(stats.slope_leaf.slope, d)
    return stats


def run_ensemble(config: EnsembleConfig, progress: bool = False) -> EnsembleReport:
    """
    Run ``config.replicas`` independent trajectories and aggregate them.

    Writes records_{replica}.csv per replica (urn.csv in urn mode) and
    report.json under ``config.out_dir``.

    Raises:
        ConfigError: invalid configuration (horizon below t0, bad graph, ...)
        PersistenceError: output directory or files not writable
    """
    out_dir = storage.ensure_dir(Path(config.out_dir))
    if config.mode == "urn":
        return _run_urn_ensemble(config, out_dir, progress)

    topology = build_from_spec(config.graph)
    # fail fast on a bad config before spawning workers
    _, first_state = _build_walk(config, topology, 0)
    checkpoint_plan(config.m, config.k_max, first_state.t0, config.t_max)

    logger.info(
        f"Starting {config.mode} ensemble: {config.replicas} replicas, t_max={config.t_max}, "
        f"|V|={topology.n_vertices}, out={out_dir}"
    )
    started = time.perf_counter()
    results = sorted(_execute(run_replica, config, progress), key=lambda r: r["summary"].replica)
    runtime = time.perf_counter() - started

    statistics = build_statistics(
        [r["records"] for r in results],
        d=topology.d,
        has_leaf=topology.has_leaves,
        family=topology.family.value,
        burn_in=config.burn_in,
        mode=config.mode,
    )
    total_steps = sum(r["summary"].steps for r in results)
    report = EnsembleReport(
        mode=config.mode,
        statistics=statistics,
        replica_summaries=[r["summary"] for r in results],
        total_steps=total_steps,
        runtime_seconds=runtime,
        steps_per_sec=total_steps / runtime if runtime > 0 else None,
        files=[r["path"] for r in results],
    )
    storage.write_json(out_dir / "report.json", report.model_dump_json(indent=2))
    logger.info(
        f"Finished {config.replicas} replicas in {runtime:.2f}s "
        f"({report.steps_per_sec or 0:.0f} steps/sec); report at {out_dir / 'report.json'}"
    )
    return report


def aggregate(
    paths: Sequence[Path | str],
    graph: Optional[GraphSpec] = None,
    burn_in: Optional[int] = None,
    mode: str = "vrrw",
) -> EnsembleReport:
    """
    Rebuild the statistical part of a report from checkpoint CSVs.

    Without ``graph`` the files are taken to come from a complete-like graph;
    leaves are inferred from nonzero leaf totals.

    Raises:
        ConfigError: no files, schema mismatch, or mismatched schedules
        PersistenceError: unreadable file
    """
    if not paths:
        raise ConfigError("aggregate needs at least one checkpoint file")
    ensemble: List[List[CheckpointRecord]] = []
    dims = set()
    for path in paths:
        d, records = storage.read_records(Path(path))
        if not records:
            raise ConfigError(f"{path}: no checkpoint rows")
        dims.add(d)
        ensemble.append(records)
    if len(dims) != 1:
        raise ConfigError(f"checkpoint files disagree on d: {sorted(dims)}")
    d = dims.pop()

    if graph is not None:
        topology = build_from_spec(graph)
        family, has_leaf = topology.family.value, topology.has_leaves
    else:
        family = GraphFamily.COMPLETE_LIKE.value
        has_leaf = any(z > 0 for z in ensemble[0][0].leaf_totals)

    statistics = build_statistics(ensemble, d, has_leaf, family=family, burn_in=burn_in, mode=mode)
    logger.info(f"Aggregated {len(paths)} checkpoint files")
    return EnsembleReport(mode=mode, statistics=statistics, files=[str(p) for p in paths])


def run_urn_replica(config_data: Dict[str, Any], replica: int) -> Dict[str, Any]:
    """One urn trajectory recorded at the checkpoint draw counts"""
    config = EnsembleConfig.model_validate(config_data)
    p = config.urn
    seed = derive_seed(config.base_seed, replica)
    started = time.perf_counter()
    state = init_urn(p.x0, p.y0, p.a, p.b, p.c, p.d)
    record_at = [t for _, t in checkpoint_plan(config.m, config.k_max, 1, config.t_max)]
    trajectory = run_urn(state, config.t_max, record_at=record_at, which=p.statistic,
                         stream=UniformStream(seed=seed))
    fractions = [x / (x + y) for x, y in zip(trajectory.X, trajectory.Y)]
    summary = ReplicaSummary(
        replica=replica, seed=seed, steps=state.n, seconds=time.perf_counter() - started
    )
    return {"trajectory": trajectory, "fractions": fractions, "summary": summary,
            "final_fraction": urn_fraction(state)}


def _urn_rows(results: Iterable[Dict[str, Any]]):
    for r in results:
        traj = r["trajectory"]
        for n, x, y, stat in zip(traj.ns, traj.X, traj.Y, traj.stat):
            yield r["summary"].replica, n, x, y, stat


def _nan_quantiles(values: np.ndarray, percents: List[int]) -> List[Optional[float]]:
    if np.all(np.isnan(values)):
        return [None] * len(percents)
    return [float(q) for q in np.nanpercentile(values, percents, method="lower")]


def _run_urn_ensemble(config: EnsembleConfig, out_dir: Path, progress: bool) -> EnsembleReport:
    logger.info(f"Starting urn ensemble: {config.replicas} replicas, {config.t_max} draws, out={out_dir}")
    started = time.perf_counter()
    results = sorted(_execute(run_urn_replica, config, progress), key=lambda r: r["summary"].replica)
    runtime = time.perf_counter() - started

    path = storage.write_urn_rows(out_dir / "urn.csv", _urn_rows(results))
    percents = list(REPORT_QUANTILES)
    ns = results[0]["trajectory"].ns
    stats = np.array([r["trajectory"].stat for r in results], dtype=np.float64)
    fractions = np.array([r["fractions"] for r in results], dtype=np.float64)
    rows = [
        UrnQuantileRow(
            n=n,
            stat=_nan_quantiles(stats[:, i], percents),
            fraction=[float(q) for q in np.percentile(fractions[:, i], percents, method="lower")],
        )
        for i, n in enumerate(ns)
    ]
    total_steps = sum(r["summary"].steps for r in results)
    report = EnsembleReport(
        mode="urn",
        urn=rows,
        replica_summaries=[r["summary"] for r in results],
        total_steps=total_steps,
        runtime_seconds=runtime,
        steps_per_sec=total_steps / runtime if runtime > 0 else None,
        files=[str(path)],
    )
    storage.write_json(out_dir / "report.json", report.model_dump_json(indent=2))
    logger.info(f"Finished urn ensemble in {runtime:.2f}s; report at {out_dir / 'report.json'}")
    return report
