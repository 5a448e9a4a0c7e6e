"""Large-deviation API router"""
import logging
from fastapi import APIRouter, HTTPException, status

from app.core.exceptions import ConfigError
from app.modules.ld_tools.models import ChernoffRow
from app.modules.ld_tools.schemas import (
    ChernoffRequest,
    ChernoffResponse,
    ChernoffRowResponse,
    EkCheckRequest,
    EkCheckResponse,
    EntropyInput,
    EntropyResponse,
    FrozenPredictionRequest,
    FrozenPredictionResponse,
)
from app.modules.ld_tools.services import (
    chernoff_bound,
    chernoff_table,
    ek_check,
    ek_threshold,
    entropy_approx_check,
    exact_binomial_tail,
    frozen_prediction,
)

logger = logging.getLogger(__name__)

router = APIRouter()


def _row(row: ChernoffRow) -> ChernoffRowResponse:
    return ChernoffRowResponse(
        k=row.k,
        a=row.a,
        side=row.side,
        bound=row.bound,
        exact_tail=row.exact_tail,
        dominates=row.dominates,
    )


@router.post("/entropy", response_model=EntropyResponse)
async def get_entropy(request: EntropyInput):
    """H(a, p) and its small-deviation approximation"""
    check = entropy_approx_check(request.a, request.p, extended=request.extended)
    return EntropyResponse(
        a=request.a,
        p=request.p,
        entropy=check.exact,
        quadratic_approx=check.quadratic_approx,
        relative_gap=check.relative_gap,
        outside_small_delta=check.outside_small_delta,
        small_p_approx=check.small_p_approx,
    )


@router.post("/chernoff", response_model=ChernoffResponse)
async def get_chernoff(request: ChernoffRequest):
    """Chernoff bound against the exact binomial tail"""
    try:
        if request.a is None:
            rows = [_row(r) for r in chernoff_table(request.n, request.p)]
        else:
            bound = chernoff_bound(request.n, request.p, request.a, request.side)
            exact = exact_binomial_tail(request.n, request.p, request.a, request.side)
            rows = [
                ChernoffRowResponse(
                    k=round(request.n * request.a),
                    a=request.a,
                    side=request.side,
                    bound=bound,
                    exact_tail=exact,
                    dominates=bound >= exact,
                )
            ]
    except ConfigError as e:
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail=str(e)
        )
    return ChernoffResponse(n=request.n, p=request.p, rows=rows)


@router.post("/frozen-prediction", response_model=FrozenPredictionResponse)
async def get_frozen_prediction(request: FrozenPredictionRequest):
    """Expected block shares with weights frozen at alpha"""
    try:
        prediction = frozen_prediction(request.alpha, request.N_k)
    except ConfigError as e:
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail=str(e)
        )
    return FrozenPredictionResponse(
        shares=list(prediction.shares),
        expected_counts=list(prediction.expected_counts),
        theta=prediction.theta,
    )


@router.post("/ek-check", response_model=EkCheckResponse)
async def check_ek(request: EkCheckRequest):
    """Concentration check of observed block counts"""
    try:
        holds = ek_check(request.observed, request.predicted, request.k, request.m, request.nu)
    except ConfigError as e:
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail=str(e)
        )
    return EkCheckResponse(holds=holds, threshold=ek_threshold(request.k, request.m, request.nu))
