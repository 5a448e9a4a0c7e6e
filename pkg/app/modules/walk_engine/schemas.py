"""Walk request and response schemas"""
from pydantic import BaseModel, Field, model_validator
from typing import Dict, List, Literal, Optional, Union

from app.core.config import settings
from app.modules.graph_model.schemas import GraphSpec
from app.modules.graph_model.services import parse_vertex
from app.modules.rate_analysis.models import CheckpointRecord
from app.modules.walk_engine.models import ScheduleForm, ScheduleSpec


class ScheduleModel(BaseModel):
    """Special-vertex schedule: ``{"special": "3", "form": "affine", "h0": 0, "c": 2}``"""
    special: str = "3"
    form: Literal["affine", "table"] = "affine"
    h0: int = 0
    c: int = 1
    table: List[int] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_form(self) -> "ScheduleModel":
        if self.form == "table" and not self.table:
            raise ValueError("table schedule needs a non-empty 'table'")
        return self

    def to_spec(self) -> ScheduleSpec:
        return ScheduleSpec(
            special=parse_vertex(self.special),
            form=ScheduleForm(self.form),
            h0=self.h0,
            c=self.c,
            table=tuple(self.table),
        )


class CheckpointRow(BaseModel):
    """One checkpoint record as returned by the API"""
    replica: int
    k: int
    t: int
    pos: str
    totals: List[int]
    leaf_totals: List[int]
    eta: float
    sup_dist: float
    xi_12: float
    Xi_12: Optional[float] = None
    theta: float

    @classmethod
    def from_record(cls, record: CheckpointRecord) -> "CheckpointRow":
        return cls(
            replica=record.replica,
            k=record.k,
            t=record.t,
            pos=record.pos,
            totals=list(record.totals),
            leaf_totals=list(record.leaf_totals),
            eta=record.eta,
            sup_dist=record.sup_dist,
            xi_12=record.xi_12,
            Xi_12=record.Xi_12,
            theta=record.theta,
        )


class WalkRequest(BaseModel):
    """Single-replica simulation request"""
    graph: GraphSpec
    initial_weights: Optional[Union[int, List[int]]] = None
    start: Optional[str] = None
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED)
    schedule: Optional[ScheduleModel] = None
    observe: Optional[str] = Field(None, description="Excursion observation vertex (triangle only)")
    t_max: int = Field(..., ge=1)
    m: float = Field(default_factory=lambda: settings.DEFAULT_M, gt=1)
    k_max: int = Field(20, ge=1)


class WalkResult(BaseModel):
    """Checkpoints and summaries of one trajectory"""
    mode: str
    t0: int
    t: int
    steps: int
    special_visits: int
    records: List[CheckpointRow]
    excursions: Optional[Dict[str, Dict[int, int]]] = None
    xi_range: Optional[List[float]] = None
    xi_L: Optional[float] = None
    xi_R: Optional[float] = None


class ExcursionProbabilityRequest(BaseModel):
    """Excursion probability query"""
    u: int = Field(..., ge=1)
    v: int = Field(..., ge=1)
    a: int = Field(..., ge=1)
    m: int = Field(..., ge=1)
    mode: Literal["exact", "geometric"] = "exact"
    event: Optional[Literal["A", "B", "A_bar", "B_bar"]] = None


class ExcursionProbabilityResponse(BaseModel):
    """P(C_m), and the event probability when one was asked for"""
    tail: float
    event: Optional[str] = None
    probability: Optional[float] = None
