"""Graph API router"""
import logging
from fastapi import APIRouter, HTTPException, status

from app.core.exceptions import ConfigError
from app.modules.graph_model.schemas import GraphSpec, GraphDescription
from app.modules.graph_model.services import build_from_spec, describe

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post("/describe", response_model=GraphDescription)
async def describe_graph(spec: GraphSpec):
    """Validate a graph specification and return its vertices, neighbors and target measure"""
    try:
        topology = build_from_spec(spec)
    except ConfigError as e:
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail=str(e)
        )
    return GraphDescription(**describe(topology))
