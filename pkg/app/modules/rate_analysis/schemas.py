"""Rate-analysis request and response schemas"""
from pydantic import BaseModel, Field
from typing import List, Literal, Optional, Tuple


class ScheduleResponse(BaseModel):
    """Checkpoint times t_k = round(k^m)"""
    m: float
    k_max: int
    times: List[int]


class BandResponse(BaseModel):
    """Decay exponents for a given d"""
    d: int
    has_leaf: bool
    upper: float
    lower: Optional[float] = None
    leaf_exponent: float


class RecursionRequest(BaseModel):
    """Parameters of the eta recursion"""
    C: float = Field(..., gt=0)
    D: float = Field(..., ge=0)
    beta_tilde: float = Field(..., ge=0, le=1)
    epsilon: float = Field(..., gt=0, lt=1)
    eta0: float = Field(..., ge=0)
    k0: int = Field(1, ge=1)
    K: int = Field(..., ge=2, le=10_000_000)
    forcing: Literal["equality", "inequality_max"] = "equality"
    seed: Optional[int] = None
    windows: List[Tuple[int, int]] = Field(default_factory=list, description="(k_lo, k_hi) windows for window_sup")


class RecursionResponse(BaseModel):
    """Scaled supremum of the iterated sequence"""
    branch: str
    sup: float
    final_eta: float
    clamp_count: int
    excess: Optional[float] = None
    window_sups: List[float] = Field(default_factory=list)


class FitRequest(BaseModel):
    """(t, value) points for a log-log fit"""
    points: List[Tuple[float, float]]
    t_min: float = 0.0


class FitResponse(BaseModel):
    """Fitted exponent"""
    slope: float
    intercept: float
    residual: float
    n_points: int
    stderr: float

