"""Ensemble API router"""
import logging
from fastapi import APIRouter, HTTPException, status

from app.core.config import settings
from app.core.exceptions import ConfigError, PersistenceError
from app.modules.mc_harness.schemas import EnsembleConfig, EnsembleReport
from app.modules.mc_harness.services import run_ensemble

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post("", response_model=EnsembleReport, status_code=status.HTTP_201_CREATED)
def create_ensemble(config: EnsembleConfig):
    """Run an ensemble and return its report; work is capped by API_MAX_WORK"""
    work = config.replicas * config.t_max
    if work > settings.API_MAX_WORK:
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail=f"replicas * t_max = {work} exceeds API_MAX_WORK={settings.API_MAX_WORK}"
        )
    try:
        return run_ensemble(config)
    except ConfigError as e:
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail=str(e)
        )
    except PersistenceError as e:
        logger.error(f"Ensemble output failed: {e}", exc_info=True)
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=f"Could not write ensemble output: {e}"
        )
