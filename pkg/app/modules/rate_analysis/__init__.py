"""Checkpoint schedules, exponent fits and rate bounds"""
from app.modules.rate_analysis.models import (
    Band,
    CheckpointRecord,
    FitResult,
    RecursionParams,
    RecursionResult,
)

__all__ = [
    "Band",
    "CheckpointRecord",
    "FitResult",
    "RecursionParams",
    "RecursionResult",
]
