"""Ensemble configuration and report schemas"""
from pydantic import BaseModel, Field, model_validator
from typing import Dict, List, Literal, Optional, Union

from app.core.config import settings
from app.modules.graph_model.schemas import GraphSpec
from app.modules.urn_models.schemas import UrnParams
from app.modules.walk_engine.schemas import ScheduleModel


class EnsembleConfig(BaseModel):
    """
    Declarative ensemble run.

    ``t_max`` is the walk horizon (vrrw, mvrrw) or the number of draws (urn).
    When ``k_max`` is omitted the checkpoint schedule is extended until it
    reaches ``t_max``.
    """
    mode: Literal["vrrw", "mvrrw", "urn"] = "vrrw"
    graph: GraphSpec = Field(default_factory=lambda: GraphSpec(d=3))
    initial_weights: Optional[Union[int, List[int]]] = None
    start: Optional[str] = None
    t_max: int = Field(..., ge=1)
    m: float = Field(default_factory=lambda: settings.DEFAULT_M, gt=1)
    k_max: Optional[int] = Field(None, ge=1)
    replicas: int = Field(1, ge=1)
    base_seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED)
    out_dir: str = Field(default_factory=lambda: settings.OUTPUT_DIR)
    schedule: Optional[ScheduleModel] = None
    urn: Optional[UrnParams] = None
    workers: Optional[int] = Field(None, ge=1)
    burn_in: int = Field(default_factory=lambda: settings.BURN_IN_T, ge=0)
    xi_from: Optional[int] = Field(None, ge=0)

    @model_validator(mode="after")
    def _check_mode(self) -> "EnsembleConfig":
        if self.mode == "mvrrw" and self.schedule is None:
            raise ValueError("mvrrw mode needs a 'schedule'")
        if self.mode == "vrrw" and self.schedule is not None:
            raise ValueError("vrrw mode takes no 'schedule'; use mode 'mvrrw'")
        if self.mode == "urn" and self.urn is None:
            self.urn = UrnParams()
        return self


class FitSummary(BaseModel):
    """Log-log fit of a median curve"""
    slope: float
    intercept: float
    residual: float
    n_points: int
    stderr: float


class QuantileRow(BaseModel):
    """Replica quantiles at one checkpoint"""
    k: int
    t: int
    sup_dist: List[float]
    eta: List[float]
    leaf_total: List[float]


class ReportStatistics(BaseModel):
    """Part of the report that is a pure function of the checkpoint records"""
    family: str
    d: int
    has_leaf: bool
    replicas: int
    quantiles: List[int]
    burn_in: int
    checkpoints: List[QuantileRow]
    slope_sup_dist: Optional[FitSummary] = None
    slope_eta: Optional[FitSummary] = None
    slope_leaf: Optional[FitSummary] = None
    band: Optional[Dict[str, Optional[float]]] = None
    verdict: Dict[str, Optional[bool]] = Field(default_factory=dict)
    flags: List[str] = Field(default_factory=list)


class ReplicaSummary(BaseModel):
    """Per-replica bookkeeping"""
    replica: int
    seed: int
    steps: int
    seconds: float
    special_visits: int = 0
    xi_range: Optional[List[float]] = None
    xi_L: Optional[float] = None
    xi_R: Optional[float] = None
    excursions: Optional[Dict[str, Dict[int, int]]] = None


class UrnQuantileRow(BaseModel):
    """Replica quantiles of an urn at one draw count"""
    n: int
    stat: List[Optional[float]]
    fraction: List[float]


class EnsembleReport(BaseModel):
    """Aggregated ensemble output written to report.json"""
    mode: str
    statistics: Optional[ReportStatistics] = None
    urn: Optional[List[UrnQuantileRow]] = None
    replica_summaries: List[ReplicaSummary] = Field(default_factory=list)
    total_steps: int = 0
    runtime_seconds: Optional[float] = None
    steps_per_sec: Optional[float] = None
    files: List[str] = Field(default_factory=list)
