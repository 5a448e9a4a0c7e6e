"""Large-deviation request and response schemas"""
from pydantic import BaseModel, Field
from typing import List, Literal, Optional

from app.core.config import settings


class EntropyInput(BaseModel):
    """Arguments of H(a, p), both strictly inside (0, 1)"""
    a: float = Field(..., gt=0, lt=1)
    p: float = Field(..., gt=0, lt=1)
    extended: bool = False


class EntropyResponse(BaseModel):
    """Entropy with its quadratic approximation"""
    a: float
    p: float
    entropy: float
    quadratic_approx: float
    relative_gap: float
    outside_small_delta: bool
    small_p_approx: Optional[float] = None


class ChernoffRequest(BaseModel):
    """Bound request; omit ``a`` to tabulate every k/n"""
    n: int = Field(..., ge=1, le=100_000)
    p: float = Field(..., gt=0, lt=1)
    a: Optional[float] = Field(None, gt=0, lt=1)
    side: Literal["upper", "lower"] = "upper"


class ChernoffRowResponse(BaseModel):
    """One threshold of a Chernoff table"""
    k: int
    a: float
    side: str
    bound: float
    exact_tail: float
    dominates: bool


class ChernoffResponse(BaseModel):
    """Bound(s) next to exact binomial tails"""
    n: int
    p: float
    rows: List[ChernoffRowResponse]


class FrozenPredictionRequest(BaseModel):
    """Block weights alpha and block length N_k"""
    alpha: List[float] = Field(..., min_length=1)
    N_k: float = Field(..., ge=0)


class FrozenPredictionResponse(BaseModel):
    """Predicted shares and counts"""
    shares: List[float]
    expected_counts: List[float]
    theta: float


class EkCheckRequest(BaseModel):
    """Observed block counts against their prediction"""
    observed: List[float] = Field(..., min_length=1)
    predicted: List[float] = Field(..., min_length=1)
    k: int = Field(..., ge=1)
    m: float = Field(default_factory=lambda: settings.DEFAULT_M, gt=1)
    nu: float = Field(default_factory=lambda: settings.DEFAULT_NU, gt=0)


class EkCheckResponse(BaseModel):
    """Verdict and the deviation threshold used"""
    holds: bool
    threshold: float
