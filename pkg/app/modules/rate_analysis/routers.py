"""Rate-analysis API router"""
import logging
from fastapi import APIRouter, HTTPException, Query, status

from app.core.config import settings
from app.core.exceptions import ConfigError
from app.modules.rate_analysis.models import RecursionParams
from app.modules.rate_analysis.schemas import (
    BandResponse,
    FitRequest,
    FitResponse,
    RecursionRequest,
    RecursionResponse,
    ScheduleResponse,
)
from app.modules.rate_analysis.services import (
    checkpoint_schedule,
    fit_power_exponent,
    leaf_exponent_target,
    recursion_iterate,
    theorem2_band,
    window_sup,
)

logger = logging.getLogger(__name__)

router = APIRouter()


def _unprocessable(e: ConfigError) -> HTTPException:
    return HTTPException(
        status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
        detail=str(e)
    )


@router.get("/schedule", response_model=ScheduleResponse)
async def get_schedule(
    m: float = Query(settings.DEFAULT_M, description="Checkpoint exponent"),
    k_max: int = Query(20, ge=1, le=100_000),
):
    """Checkpoint times round(k^m), k = 1..k_max"""
    try:
        times = checkpoint_schedule(m, k_max)
    except ConfigError as e:
        raise _unprocessable(e)
    return ScheduleResponse(m=m, k_max=k_max, times=times)


@router.get("/band/{d}", response_model=BandResponse)
async def get_band(d: int, has_leaf: bool = Query(False)):
    """Decay exponents and leaf growth exponent for d interior vertices"""
    try:
        band = theorem2_band(d, has_leaf)
    except ConfigError as e:
        raise _unprocessable(e)
    return BandResponse(
        d=d,
        has_leaf=has_leaf,
        upper=band.upper,
        lower=band.lower,
        leaf_exponent=leaf_exponent_target(d),
    )


@router.post("/recursion", response_model=RecursionResponse)
def run_recursion(request: RecursionRequest):
    """Iterate the eta recursion and report sup eta_k h(k)"""
    params = RecursionParams(
        C=request.C,
        D=request.D,
        beta_tilde=request.beta_tilde,
        epsilon=request.epsilon,
        eta0=request.eta0,
        k0=request.k0,
    )
    try:
        result = recursion_iterate(params, request.K, request.forcing, request.seed)
        window_sups = [window_sup(result, lo, hi) for lo, hi in request.windows]
    except ConfigError as e:
        raise _unprocessable(e)
    return RecursionResponse(
        branch=result.branch,
        sup=result.sup,
        final_eta=float(result.eta[-1]),
        clamp_count=result.clamp_count,
        excess=result.excess,
        window_sups=window_sups,
    )


@router.post("/fit", response_model=FitResponse)
async def fit_exponent(request: FitRequest):
    """Least-squares log-log slope of the points with t >= t_min"""
    points = [p for p in request.points if p[0] >= request.t_min]
    try:
        fit = fit_power_exponent(points)
    except ConfigError as e:
        raise _unprocessable(e)
    return FitResponse(**fit.__dict__)
