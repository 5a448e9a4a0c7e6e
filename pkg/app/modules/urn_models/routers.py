"""Urn API router"""
import logging
import math
from fastapi import APIRouter, HTTPException, status

from app.core.exceptions import ConfigError
from app.modules.urn_models.schemas import UrnRequest, UrnResponse
from app.modules.urn_models.services import (
    friedman_target,
    init_urn,
    regime_statistic,
    run_urn,
    urn_fraction,
)

logger = logging.getLogger(__name__)

router = APIRouter()


def _finite(value: float):
    return None if math.isnan(value) else value


@router.post("/simulate", response_model=UrnResponse)
def simulate_urn(request: UrnRequest):
    """Run one urn trajectory and report its regime statistic"""
    p = request.params
    try:
        state = init_urn(p.x0, p.y0, p.a, p.b, p.c, p.d)
        trajectory = run_urn(state, request.steps, request.seed, request.record_at, p.statistic)
    except ConfigError as e:
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail=str(e)
        )

    try:
        statistic = regime_statistic(state, p.statistic)
    except ConfigError:
        statistic = None
    try:
        target = friedman_target(p.a, p.b, p.c, p.d)
    except ConfigError:
        target = None

    return UrnResponse(
        n=state.n,
        X=state.X,
        Y=state.Y,
        fraction=urn_fraction(state),
        statistic=statistic,
        friedman_target=target,
        ns=trajectory.ns,
        xs=trajectory.X,
        ys=trajectory.Y,
        stats=[_finite(s) for s in trajectory.stat],
    )
