"""Command-line entry point: ``python -m app.cli``"""
import functools
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import click
from dotenv import load_dotenv
from pydantic import ValidationError

from app.core.config import settings
from app.core.exceptions import ConfigError, PersistenceError
from app.modules.graph_model.schemas import GraphSpec
from app.modules.ld_tools.services import chernoff_table
from app.modules.mc_harness.schemas import EnsembleConfig
from app.modules.mc_harness.services import aggregate, run_ensemble
from app.modules.rate_analysis.models import RecursionParams
from app.modules.rate_analysis.services import recursion_iterate, window_sup

logger = logging.getLogger("vrrw_lab")

EXIT_CONFIG = 2
EXIT_IO = 3


def handle_errors(func):
    """Map domain errors to exit codes: 2 for configuration, 3 for I/O"""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (ConfigError, ValidationError) as e:
            click.echo(f"Configuration error: {e}", err=True)
            sys.exit(EXIT_CONFIG)
        except PersistenceError as e:
            logger.error(f"I/O failure: {e}", exc_info=True)
            click.echo(f"I/O error: {e}", err=True)
            sys.exit(EXIT_IO)
    return wrapper


def _parse_ints(text: Optional[str]) -> Optional[List[int]]:
    if text is None or text == "":
        return None
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {text!r}")


def _load_config(path: Optional[str]) -> Dict[str, Any]:
    if path is None:
        return {}
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise PersistenceError(f"Cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}") from e


def _merge(base: Dict[str, Any], **overrides) -> Dict[str, Any]:
    """Inline flags override values from --config; unset flags are ignored"""
    merged = dict(base)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return merged


def _graph_from_flags(d: Optional[int], leaves: Optional[str]) -> Optional[Dict[str, Any]]:
    leaf_counts = _parse_ints(leaves)
    if d is None and leaf_counts is None:
        return None
    return GraphSpec(d=d, leaves=leaf_counts).model_dump(mode="json")


def _emit(report) -> None:
    click.echo(report.model_dump_json(indent=2, exclude={"replica_summaries"}))


def ensemble_options(func):
    """Options shared by the walk and mvrrw commands"""
    options = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False), help="JSON EnsembleConfig"),
        click.option("--d", type=int, help="Number of interior vertices"),
        click.option("--leaves", help="Leaf counts per interior vertex, e.g. 0,0,1"),
        click.option("--weights", help="Initial weights per vertex, e.g. 1,1,1"),
        click.option("--start", help="Start vertex label"),
        click.option("--tmax", type=int, help="Horizon t_max"),
        click.option("--m", type=float, help="Checkpoint exponent"),
        click.option("--kmax", type=int, help="Last checkpoint index"),
        click.option("--replicas", type=int, help="Number of replicas"),
        click.option("--seed", type=int, help="Base seed"),
        click.option("--out", help="Output directory"),
        click.option("--workers", type=int, help="Worker processes"),
        click.option("--burn-in", "burn_in", type=int, help="Fit checkpoints with t >= burn-in"),
        click.option("--progress/--no-progress", default=True, help="Show a progress bar"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _ensemble_data(config_path, d, leaves, weights, start, tmax, m, kmax, replicas, seed, out, workers,
                   burn_in) -> Dict[str, Any]:
    return _merge(
        _load_config(config_path),
        graph=_graph_from_flags(d, leaves),
        initial_weights=_parse_ints(weights),
        start=start,
        t_max=tmax,
        m=m,
        k_max=kmax,
        replicas=replicas,
        base_seed=seed,
        out_dir=out,
        workers=workers,
        burn_in=burn_in,
    )


@click.group()
@click.option("--log-level", default=None, help="Override LOG_LEVEL")
def cli(log_level: Optional[str]):
    """Simulation lab for vertex-reinforced random walks"""
    load_dotenv()
    logging.basicConfig(
        level=(log_level or settings.LOG_LEVEL).upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )


@cli.command()
@ensemble_options
@handle_errors
def walk(progress, **flags):
    """Ensemble of plain vertex-reinforced walks"""
    data = _ensemble_data(**flags)
    data["mode"] = "vrrw"
    report = run_ensemble(EnsembleConfig.model_validate(data), progress=progress)
    _emit(report)


@cli.command()
@ensemble_options
@click.option("--special", default=None, help="Special vertex label (default 3)")
@click.option("--h0", type=int, default=None, help="Schedule offset: H(k) = h0 + c k")
@click.option("--c", "slope", type=int, default=None, help="Schedule slope c >= 1")
@handle_errors
def mvrrw(progress, special, h0, slope, **flags):
    """Ensemble of modified walks with an affine special-vertex schedule"""
    data = _ensemble_data(**flags)
    data["mode"] = "mvrrw"
    schedule = dict(data.get("schedule") or {"special": "3", "form": "affine", "h0": 0, "c": 2})
    schedule.update({k: v for k, v in {"special": special, "h0": h0, "c": slope}.items() if v is not None})
    data["schedule"] = schedule
    report = run_ensemble(EnsembleConfig.model_validate(data), progress=progress)
    _emit(report)


@cli.command()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="JSON EnsembleConfig")
@click.option("--a", type=float)
@click.option("--b", type=float)
@click.option("--c", type=float)
@click.option("--d", type=float)
@click.option("--x0", type=float)
@click.option("--y0", type=float)
@click.option("--statistic", type=click.Choice(["thurn1", "thurn2", "fraction"]))
@click.option("--steps", type=int, help="Number of draws")
@click.option("--m", type=float, help="Recording exponent")
@click.option("--replicas", type=int)
@click.option("--seed", type=int)
@click.option("--out", help="Output directory")
@click.option("--workers", type=int)
@click.option("--progress/--no-progress", default=True)
@handle_errors
def urn(config_path, a, b, c, d, x0, y0, statistic, steps, m, replicas, seed, out, workers, progress):
    """Ensemble of generalized Polya urns; writes urn.csv"""
    base = _load_config(config_path)
    params = _merge(base.get("urn") or {}, a=a, b=b, c=c, d=d, x0=x0, y0=y0, statistic=statistic)
    data = _merge(base, t_max=steps, m=m, replicas=replicas, base_seed=seed, out_dir=out, workers=workers)
    data.update(mode="urn", urn=params)
    report = run_ensemble(EnsembleConfig.model_validate(data), progress=progress)
    _emit(report)


@cli.command()
@click.argument("paths", nargs=-1, type=click.Path())
@click.option("--dir", "directory", type=click.Path(file_okay=False), help="Read every records_*.csv here")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="Config that produced the files")
@click.option("--burn-in", "burn_in", type=int)
@handle_errors
def rates(paths, directory, config_path, burn_in):
    """Fit exponents and band verdicts from checkpoint CSVs"""
    files = [Path(p) for p in paths]
    if directory:
        files.extend(sorted(Path(directory).glob("records_*.csv")))
    config = _load_config(config_path)
    graph = GraphSpec.model_validate(config["graph"]) if "graph" in config else None
    report = aggregate(
        files,
        graph=graph,
        burn_in=burn_in if burn_in is not None else config.get("burn_in"),
        mode=config.get("mode", "vrrw"),
    )
    stats = report.statistics
    click.echo(json.dumps(
        {
            "slope_sup_dist": stats.slope_sup_dist.slope if stats.slope_sup_dist else None,
            "slope_eta": stats.slope_eta.slope if stats.slope_eta else None,
            "slope_leaf": stats.slope_leaf.slope if stats.slope_leaf else None,
            "band": stats.band,
            "verdict": stats.verdict,
            "flags": stats.flags,
        },
        indent=2,
    ))


@cli.command()
@click.option("--C", "C", type=float, required=True)
@click.option("--D", "D", type=float, required=True)
@click.option("--beta", type=float, required=True, help="beta_tilde in [0, 1]")
@click.option("--epsilon", type=float, default=0.5, show_default=True)
@click.option("--eta0", type=float, default=0.1, show_default=True)
@click.option("--k0", type=int, default=10, show_default=True)
@click.option("--K", "K", type=int, default=1_000_000, show_default=True)
@click.option("--forcing", type=click.Choice(["equality", "inequality_max"]), default="equality")
@click.option("--seed", type=int)
@handle_errors
def recursion(C, D, beta, epsilon, eta0, k0, K, forcing, seed):
    """Iterate the eta recursion and report sup eta_k h(k)"""
    params = RecursionParams(C=C, D=D, beta_tilde=beta, epsilon=epsilon, eta0=eta0, k0=k0)
    result = recursion_iterate(params, K, forcing, seed)
    windows = {}
    lo = 10
    while lo * 10 <= K:
        if lo * 10 > k0:
            windows[f"[{lo}, {lo * 10}]"] = window_sup(result, max(lo, k0), lo * 10)
        lo *= 10
    click.echo(json.dumps(
        {
            "branch": result.branch,
            "sup": result.sup,
            "final_eta": float(result.eta[-1]),
            "clamp_count": result.clamp_count,
            "excess": result.excess,
            "window_sups": windows,
        },
        indent=2,
    ))


@cli.command()
@click.option("--n", type=int, required=True)
@click.option("--p", type=float, required=True)
@handle_errors
def chernoff(n, p):
    """Tabulate Chernoff bounds against exact binomial tails"""
    click.echo("n,p,k,a,side,bound,exact_tail,dominates")
    for row in chernoff_table(n, p):
        click.echo(
            f"{row.n},{row.p},{row.k},{row.a:.6g},{row.side},"
            f"{row.bound:.10g},{row.exact_tail:.10g},{row.dominates}"
        )


def main():
    cli()


if __name__ == "__main__":
    main()
