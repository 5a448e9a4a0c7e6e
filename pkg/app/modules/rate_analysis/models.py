"""Checkpoint telemetry and rate-analysis result models"""
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np


@dataclass(frozen=True)
class CheckpointRecord:
    """
    One telemetry row at a scheduled time t_k.

    ``totals`` holds Z(t, i) per interior vertex (class totals on d-partite
    graphs) and ``leaf_totals`` the matching L(t, i). ``pi`` is the full
    occupation vector; it is not persisted and comes back empty from CSV.
    """
    replica: int
    k: int
    t: int
    pos: str
    totals: Tuple[int, ...]
    leaf_totals: Tuple[int, ...]
    eta: float
    sup_dist: float
    xi_12: float
    Xi_12: Optional[float] = None
    pi: Tuple[float, ...] = ()

    @property
    def theta(self) -> float:
        return sum(self.leaf_totals) / self.t

    @property
    def leaf_total(self) -> int:
        return int(sum(self.leaf_totals))


@dataclass(frozen=True)
class FitResult:
    """Least-squares line through (log t, log value)"""
    slope: float
    intercept: float
    residual: float
    n_points: int
    stderr: float = 0.0


@dataclass(frozen=True)
class Band:
    """Decay exponents of the convergence-rate theorem (delta reported as 0)"""
    d: int
    upper: float
    lower: Optional[float] = None


@dataclass(frozen=True)
class RecursionParams:
    """
    Parameters of the eta recursion.

    eta_{k+1} <= eta_k * (1 - C (1 - eta_k) / k) + D / k^(1 + beta_tilde)
    """
    C: float
    D: float
    beta_tilde: float
    epsilon: float
    eta0: float
    k0: int = 1


@dataclass
class RecursionResult:
    """
    Iterated sequence eta_{k0}, ..., eta_K and its scaled supremum.

    ``eta[i]`` is eta at k = k0 + i. ``excess`` is only set in
    inequality_max mode: the largest amount by which the randomly sub-forced
    sequence exceeded the extremal one (<= 0 when domination holds).
    """
    params: RecursionParams
    K: int
    eta: np.ndarray
    scaled: np.ndarray
    sup: float
    branch: str
    clamp_count: int = 0
    excess: Optional[float] = None
    sub_forced: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def ks(self) -> np.ndarray:
        return np.arange(self.params.k0, self.K + 1, dtype=np.int64)
