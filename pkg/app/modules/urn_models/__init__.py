"""Generalized and multi-color Polya urns"""
from app.modules.urn_models.models import CouplingResult, MultiUrnState, UrnState, UrnTrajectory

__all__ = ["CouplingResult", "MultiUrnState", "UrnState", "UrnTrajectory"]
