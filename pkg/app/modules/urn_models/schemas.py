"""Urn request and response schemas"""
from pydantic import BaseModel, Field, model_validator
from typing import List, Literal, Optional

from app.core.config import settings


class UrnParams(BaseModel):
    """Replacement matrix and initial counts of a two-color urn"""
    a: float = Field(1.0, ge=0)
    b: float = Field(0.0, ge=0)
    c: float = Field(0.0, ge=0)
    d: float = Field(1.0, ge=0)
    x0: float = Field(1.0, ge=0)
    y0: float = Field(1.0, ge=0)
    statistic: Literal["thurn1", "thurn2", "fraction"] = "fraction"

    @model_validator(mode="after")
    def _nonempty(self) -> "UrnParams":
        if self.x0 + self.y0 <= 0:
            raise ValueError("urn needs x0 + y0 > 0")
        return self


class UrnRequest(BaseModel):
    """Single urn trajectory"""
    params: UrnParams = Field(default_factory=UrnParams)
    steps: int = Field(..., ge=1, le=100_000_000)
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED)
    record_at: List[int] = Field(default_factory=list)


class UrnResponse(BaseModel):
    """Recorded counts and final statistics"""
    n: int
    X: float
    Y: float
    fraction: float
    statistic: Optional[float] = None
    friedman_target: Optional[float] = None
    ns: List[int]
    xs: List[float]
    ys: List[float]
    stats: List[Optional[float]]
