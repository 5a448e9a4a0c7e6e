"""Large-deviation result models"""
from dataclasses import dataclass
from typing import Optional, Tuple


@dataclass(frozen=True)
class FrozenPrediction:
    """
    Expected visit shares over a block with weights held fixed.

    shares_i = alpha_i (1 - alpha_i) / sum_j alpha_j (1 - alpha_j);
    ``theta`` is the slack 1 - sum alpha left for leaves.
    """
    shares: Tuple[float, ...]
    expected_counts: Tuple[float, ...]
    theta: float


@dataclass(frozen=True)
class EntropyApproximation:
    """Exact entropy next to its quadratic small-deviation form"""
    exact: float
    quadratic_approx: float
    relative_gap: float
    outside_small_delta: bool
    small_p_approx: Optional[float] = None


@dataclass(frozen=True)
class ChernoffRow:
    """Bound against the exact binomial tail for one threshold a = k/n"""
    n: int
    p: float
    k: int
    a: float
    side: str
    bound: float
    exact_tail: float

    @property
    def dominates(self) -> bool:
        return self.bound >= self.exact_tail
