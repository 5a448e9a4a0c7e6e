"""FastAPI application entry point"""

import logging
from contextlib import asynccontextmanager

from dotenv import load_dotenv
from fastapi import FastAPI, Request, status
from fastapi.responses import JSONResponse

from app.core.config import settings
from app.core.exceptions import ConfigError, LabError
from app.core.jit import HAS_NUMBA

# Routers
from app.modules.graph_model.routers import router as graphs_router
from app.modules.walk_engine.routers import router as walks_router
from app.modules.urn_models.routers import router as urns_router
from app.modules.ld_tools.routers import router as ld_router
from app.modules.rate_analysis.routers import router as rates_router
from app.modules.mc_harness.routers import router as ensembles_router

# Load environment variables
load_dotenv()

# --------------------------------------------------
# Logging
# --------------------------------------------------
logging.basicConfig(
    level=settings.LOG_LEVEL,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)
logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    logger.info(
        f"VRRW Lab API starting (numba={'on' if HAS_NUMBA else 'off'}, "
        f"output dir={settings.OUTPUT_DIR}, max work={settings.API_MAX_WORK})"
    )
    yield


# --------------------------------------------------
# Create FastAPI app
# --------------------------------------------------
app = FastAPI(
    title="VRRW Lab API",
    description="Simulation and analysis of vertex-reinforced random walks, urns and convergence rates",
    version="1.0.0",
    lifespan=lifespan
)


@app.exception_handler(LabError)
async def lab_error_handler(request: Request, exc: LabError):
    if isinstance(exc, ConfigError):
        return JSONResponse(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, content={"detail": str(exc)})
    logger.error(f"Unhandled lab error on {request.url.path}: {exc}", exc_info=True)
    return JSONResponse(status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, content={"detail": str(exc)})


# --------------------------------------------------
# Routers
# --------------------------------------------------
app.include_router(graphs_router, prefix="/graphs", tags=["Graphs"])
app.include_router(walks_router, prefix="/walks", tags=["Walks"])
app.include_router(urns_router, prefix="/urns", tags=["Urns"])
app.include_router(ld_router, prefix="/ld", tags=["Large Deviations"])
app.include_router(rates_router, prefix="/rates", tags=["Rates"])
app.include_router(ensembles_router, prefix="/ensembles", tags=["Ensembles"])


# --------------------------------------------------
# Utility endpoints
# --------------------------------------------------
@app.get("/")
async def root():
    return {"message": "VRRW Lab API", "version": "1.0.0"}


@app.get("/health")
async def health():
    return {"status": "healthy", "numba": HAS_NUMBA}
