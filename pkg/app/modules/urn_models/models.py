"""Urn states and trajectories"""
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np


@dataclass
class UrnState:
    """
    Two-color generalized Polya urn.

    A draw of the first color (probability X/(X+Y)) adds (a, b) to (X, Y),
    a draw of the second adds (c, d). Counts are reals.
    """
    X: float
    Y: float
    a: float
    b: float
    c: float
    d: float
    n: int = 0

    @property
    def params(self) -> Tuple[float, float, float, float]:
        return self.a, self.b, self.c, self.d

    def copy(self) -> "UrnState":
        return UrnState(self.X, self.Y, self.a, self.b, self.c, self.d, self.n)


@dataclass
class MultiUrnState:
    """d-color Polya urn; each draw adds one ball of the drawn color"""
    counts: np.ndarray

    @property
    def t(self) -> int:
        return int(self.counts.sum())

    @property
    def d(self) -> int:
        return int(self.counts.shape[0])


@dataclass
class UrnTrajectory:
    """Urn counts and statistic at the recorded step counts"""
    ns: List[int] = field(default_factory=list)
    X: List[float] = field(default_factory=list)
    Y: List[float] = field(default_factory=list)
    stat: List[float] = field(default_factory=list)


@dataclass(frozen=True)
class CouplingResult:
    """
    Shared-uniform run of the modified walk seen at visits to {1, 2}
    against the urn with a = c = d = 1, b = 0.

    ``Y`` is W at those visits and ``Y_prime`` the urn's second color; both
    share X = U + V.
    """
    steps: int
    dominated: bool
    first_violation: Optional[int]
    min_gap: float
    X: float
    Y: float
    Y_prime: float
