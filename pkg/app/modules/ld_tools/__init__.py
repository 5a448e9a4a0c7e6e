"""Large-deviation utilities"""
from app.modules.ld_tools.models import ChernoffRow, EntropyApproximation, FrozenPrediction

__all__ = ["ChernoffRow", "EntropyApproximation", "FrozenPrediction"]
