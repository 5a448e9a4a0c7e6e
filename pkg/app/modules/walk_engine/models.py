"""Walk state, schedules, excursion records and metric snapshots"""
import copy
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from app.core.rng import UniformStream
from app.modules.graph_model.models import GraphTopology, VertexId


class ScheduleForm(str, Enum):
    """How H(k) is produced"""
    AFFINE = "affine"
    TABLE = "table"
    ADAPTIVE = "adaptive"


@dataclass(frozen=True)
class ScheduleSpec:
    """
    Special-vertex schedule of the modified walk.

    At the k-th visit to ``special`` its weight becomes H(k): ``h0 + c*k``
    (affine), ``table[k-1]`` (table), or whatever ``hook(state, k)`` returns
    (adaptive; the hook sees the state at the visit time).
    """
    special: VertexId
    form: ScheduleForm = ScheduleForm.AFFINE
    h0: int = 0
    c: int = 1
    table: Tuple[int, ...] = ()
    hook: Optional[Callable[["WalkState", int], int]] = None

    def value(self, k: int) -> int:
        """H(k) for affine and table forms"""
        if self.form == ScheduleForm.AFFINE:
            return self.h0 + self.c * k
        if self.form == ScheduleForm.TABLE:
            return self.table[k - 1]
        raise ValueError("adaptive schedules are evaluated by their hook")


class ExcursionClass(str, Enum):
    """Classification of an excursion away from the observation vertex"""
    A = "A"          # starts at the first vertex, ends there
    B = "B"          # starts at the first vertex, ends at the second
    A_BAR = "A_bar"  # starts at the second vertex, ends there
    B_BAR = "B_bar"  # starts at the second vertex, ends at the first


EXCURSION_CLASSES = (ExcursionClass.A, ExcursionClass.B, ExcursionClass.A_BAR, ExcursionClass.B_BAR)


@dataclass(frozen=True)
class ExcursionRecord:
    """One completed excursion; ``m`` counts visits to the starting vertex"""
    k: int
    start_vertex: int
    visits_to_1: int
    visits_to_2: int
    classification: ExcursionClass

    @property
    def m(self) -> int:
        return self.visits_to_1 if self.start_vertex == 1 else self.visits_to_2


@dataclass
class WalkState:
    """
    Mutable state of one trajectory.

    ``t`` counts elapsed time from ``t0`` = sum of initial weights; with no
    schedule the weights always sum to ``t``. ``special`` is -1 for a plain
    walk and ``observe`` is -1 when excursions are not tracked.
    """
    topology: GraphTopology
    weights: np.ndarray
    initial_weights: np.ndarray
    position: int
    t: int
    t0: int
    seed: int
    stream: UniformStream
    schedule: Optional[ScheduleSpec] = None
    special: int = -1
    visit_count_special: int = 0
    last_h: int = 0
    observe: int = -1
    observe_pair: Tuple[int, int] = (-1, -1)
    tracker: np.ndarray = field(default_factory=lambda: np.full(8, -1, dtype=np.int64))
    excursion_hist: np.ndarray = field(default_factory=lambda: np.zeros((4, 2), dtype=np.int64))
    xi_pair: Tuple[int, int] = (-1, -1)
    xi_from: int = 0
    xi_range: np.ndarray = field(default_factory=lambda: np.array([math.inf, -math.inf]))

    @property
    def steps(self) -> int:
        return self.t - self.t0

    @property
    def mode(self) -> str:
        return "vrrw" if self.schedule is None else "mvrrw"

    @property
    def vertex(self) -> VertexId:
        return self.topology.vertices[self.position]

    def copy(self) -> "WalkState":
        """Independent copy sharing only the immutable topology"""
        return copy.deepcopy(self, memo={id(self.topology): self.topology})


@dataclass(frozen=True)
class WalkMetrics:
    """
    Observables of a state at time ``t``.

    ``totals`` are the interior weights per class (per interior vertex on
    complete-like graphs), ``leaf_totals`` the leaf weight attached to each.
    """
    t: int
    position: str
    pi: Tuple[float, ...]
    sup_dist: float
    eta: float
    totals: Tuple[int, ...]
    leaf_totals: Tuple[int, ...]
    xi_L: Optional[float] = None
    xi_R: Optional[float] = None
    xi_range: Optional[Tuple[float, float]] = None

    @property
    def theta(self) -> float:
        return sum(self.leaf_totals) / self.t

    def xi(self, i: int, j: int) -> float:
        """Z(t,i) / (Z(t,i) + Z(t,j)) for 1-based interiors (classes)"""
        zi, zj = self.totals[i - 1], self.totals[j - 1]
        return zi / (zi + zj)

    def Xi(self, i: int, j: int) -> Optional[float]:
        """log(Z(t,i) + Z(t,j)) - log(Z(t,j) - 1); None while Z(t,j) < 2"""
        zi, zj = self.totals[i - 1], self.totals[j - 1]
        if zj < 2:
            return None
        return math.log(zi + zj) - math.log(zj - 1)

    def as_dict(self) -> Dict[str, object]:
        return {
            "t": self.t,
            "position": self.position,
            "pi": list(self.pi),
            "sup_dist": self.sup_dist,
            "eta": self.eta,
            "totals": list(self.totals),
            "leaf_totals": list(self.leaf_totals),
            "theta": self.theta,
            "xi_12": self.xi(1, 2),
            "Xi_12": self.Xi(1, 2),
            "xi_L": self.xi_L,
            "xi_R": self.xi_R,
            "xi_range": list(self.xi_range) if self.xi_range else None,
        }
