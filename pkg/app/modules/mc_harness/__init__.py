"""Ensemble orchestration and persistence"""
from app.modules.mc_harness.schemas import EnsembleConfig, EnsembleReport, ReportStatistics

__all__ = ["EnsembleConfig", "EnsembleReport", "ReportStatistics"]
