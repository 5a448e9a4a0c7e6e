"""Vertex-reinforced walk engine"""
from app.modules.walk_engine.models import (
    EXCURSION_CLASSES,
    ExcursionClass,
    ExcursionRecord,
    ScheduleForm,
    ScheduleSpec,
    WalkMetrics,
    WalkState,
)

__all__ = [
    "EXCURSION_CLASSES",
    "ExcursionClass",
    "ExcursionRecord",
    "ScheduleForm",
    "ScheduleSpec",
    "WalkMetrics",
    "WalkState",
]
