"""CSV and JSON persistence for ensembles"""
import logging
import math
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

import pandas as pd

from app.core.exceptions import ConfigError, PersistenceError
from app.modules.rate_analysis.models import CheckpointRecord

logger = logging.getLogger(__name__)

HEAD_COLUMNS = ["replica", "k", "t", "pos"]
TAIL_COLUMNS = ["eta", "sup_dist", "xi_12", "Xi_12"]
URN_COLUMNS = ["replica", "n", "X", "Y", "stat"]

# 17 significant digits round-trip every double
FLOAT_FORMAT = "%.17g"


def record_columns(d: int) -> List[str]:
    """replica, k, t, pos, Z_1..Z_d, L_1..L_d, eta, sup_dist, xi_12, Xi_12"""
    return (
        HEAD_COLUMNS
        + [f"Z_{i}" for i in range(1, d + 1)]
        + [f"L_{i}" for i in range(1, d + 1)]
        + TAIL_COLUMNS
    )


def _optional(value) -> Optional[float]:
    if value is None or pd.isna(value):
        return None
    return float(value)


def ensure_dir(path: Path) -> Path:
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise PersistenceError(f"Cannot create output directory {path}: {e}") from e
    return path


def records_path(out_dir: Path, replica: int) -> Path:
    return out_dir / f"records_{replica}.csv"


def _to_csv(df: pd.DataFrame, path: Path) -> Path:
    try:
        df.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n")
    except OSError as e:
        raise PersistenceError(f"Cannot write {path}: {e}") from e
    return path


def records_frame(records: Sequence[CheckpointRecord], d: int) -> pd.DataFrame:
    """One row per checkpoint; Z and L columns stay integer"""
    rows = [
        [r.replica, r.k, r.t, r.pos]
        + [int(z) for z in r.totals]
        + [int(z) for z in r.leaf_totals]
        + [float(r.eta), float(r.sup_dist), float(r.xi_12), _optional(r.Xi_12)]
        for r in records
    ]
    df = pd.DataFrame(rows, columns=record_columns(d))
    return df.astype({c: float for c in TAIL_COLUMNS})


def write_records(path: Path, records: Sequence[CheckpointRecord], d: int) -> Path:
    """
    Write one replica's checkpoints.

    Raises:
        PersistenceError: the file cannot be written
    """
    return _to_csv(records_frame(records, d), path)


def _detect_d(header: List[str], path: Path) -> int:
    if len(header) < len(HEAD_COLUMNS) + len(TAIL_COLUMNS) + 2:
        raise ConfigError(f"{path}: header too short for a checkpoint file")
    d = (len(header) - len(HEAD_COLUMNS) - len(TAIL_COLUMNS)) // 2
    if header != record_columns(d):
        raise ConfigError(f"{path}: unexpected columns {header}")
    return d


def read_records(path: Path) -> Tuple[int, List[CheckpointRecord]]:
    """
    Read a checkpoint CSV.

    Returns:
        (d, records)

    Raises:
        PersistenceError: the file cannot be read
        ConfigError: the header or a row does not match the schema
    """
    try:
        df = pd.read_csv(path, dtype={"pos": str}, float_precision="round_trip")
    except OSError as e:
        raise PersistenceError(f"Cannot read {path}: {e}") from e
    except pd.errors.EmptyDataError as e:
        raise ConfigError(f"{path}: empty file") from e
    except pd.errors.ParserError as e:
        raise ConfigError(f"{path}: malformed CSV ({e})") from e

    d = _detect_d(list(df.columns), path)
    z_cols = [f"Z_{i}" for i in range(1, d + 1)]
    l_cols = [f"L_{i}" for i in range(1, d + 1)]
    records: List[CheckpointRecord] = []
    for line, row in enumerate(df.to_dict("records"), start=2):
        try:
            records.append(
                CheckpointRecord(
                    replica=int(row["replica"]),
                    k=int(row["k"]),
                    t=int(row["t"]),
                    pos=str(row["pos"]),
                    totals=tuple(int(row[c]) for c in z_cols),
                    leaf_totals=tuple(int(row[c]) for c in l_cols),
                    eta=float(row["eta"]),
                    sup_dist=float(row["sup_dist"]),
                    xi_12=float(row["xi_12"]),
                    Xi_12=_optional(row["Xi_12"]),
                )
            )
        except (TypeError, ValueError) as e:
            raise ConfigError(f"{path}:{line}: malformed row ({e})") from e
    return d, records


def write_urn_rows(path: Path, rows: Iterable[Tuple[int, int, float, float, float]]) -> Path:
    """urn.csv with columns replica, n, X, Y, stat"""
    df = pd.DataFrame(
        [(replica, n, float(x), float(y), math.nan if stat is None else float(stat))
         for replica, n, x, y, stat in rows],
        columns=URN_COLUMNS,
    )
    return _to_csv(df.astype({"X": float, "Y": float, "stat": float}), path)


def write_json(path: Path, payload: str) -> Path:
    try:
        path.write_text(payload, encoding="utf-8")
    except OSError as e:
        raise PersistenceError(f"Cannot write {path}: {e}") from e
    return path
