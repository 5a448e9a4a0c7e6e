"""Walk API router"""
import logging
from fastapi import APIRouter, HTTPException, status

from app.core.config import settings
from app.core.exceptions import ConfigError
from app.modules.graph_model.services import build_from_spec, parse_vertex
from app.modules.mc_harness.services import checkpoint_plan
from app.modules.walk_engine.excursions import (
    excursion_event_prob,
    excursion_stats,
    excursion_tail_prob,
)
from app.modules.walk_engine.schemas import (
    CheckpointRow,
    ExcursionProbabilityRequest,
    ExcursionProbabilityResponse,
    WalkRequest,
    WalkResult,
)
from app.modules.walk_engine.services import init_walk, run_to, snapshot_metrics

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post("/simulate", response_model=WalkResult)
def simulate_walk(request: WalkRequest):
    """Run one replica to t_max and return its checkpoint records"""
    try:
        topology = build_from_spec(request.graph)
        state = init_walk(
            topology,
            initial_weights=request.initial_weights,
            start=parse_vertex(request.start) if request.start else None,
            seed=request.seed,
            schedule=request.schedule.to_spec() if request.schedule else None,
            observe=parse_vertex(request.observe) if request.observe else None,
        )
        if request.t_max - state.t0 > settings.API_MAX_WORK:
            raise ConfigError(
                f"t_max - t0 = {request.t_max - state.t0} exceeds API_MAX_WORK={settings.API_MAX_WORK}"
            )
        plan = checkpoint_plan(request.m, request.k_max, state.t0, request.t_max)
        state, records = run_to(state, request.t_max, plan)
    except ConfigError as e:
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail=str(e)
        )

    metrics = snapshot_metrics(state)
    excursions = None
    if state.observe >= 0:
        excursions = {cls.value: counts for cls, counts in excursion_stats(state).items()}
    return WalkResult(
        mode=state.mode,
        t0=state.t0,
        t=state.t,
        steps=state.steps,
        special_visits=state.visit_count_special,
        records=[CheckpointRow.from_record(r) for r in records],
        excursions=excursions,
        xi_range=list(metrics.xi_range) if metrics.xi_range else None,
        xi_L=metrics.xi_L,
        xi_R=metrics.xi_R,
    )


@router.post("/excursion-probability", response_model=ExcursionProbabilityResponse)
async def excursion_probability(request: ExcursionProbabilityRequest):
    """Exact or geometric excursion probabilities for given weights"""
    try:
        tail = excursion_tail_prob(request.u, request.v, request.a, request.m, request.mode)
        probability = None
        if request.event:
            probability = excursion_event_prob(
                request.u, request.v, request.a, request.m, request.event, request.mode
            )
    except ConfigError as e:
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail=str(e)
        )
    return ExcursionProbabilityResponse(tail=tail, event=request.event, probability=probability)
