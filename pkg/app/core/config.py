"""Application configuration"""
from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import Optional


class Settings(BaseSettings):
    """Application settings"""

    # Logging
    LOG_LEVEL: str = "INFO"

    # Output
    OUTPUT_DIR: str = "runs"

    # Randomness
    DEFAULT_SEED: int = 20240917
    UNIFORM_BLOCK: int = 65536

    # Ensembles
    WORKERS: Optional[int] = None
    DEBUG_CHECKS: bool = False

    # Checkpoints and fits
    DEFAULT_M: float = 3.0
    DEFAULT_NU: float = 0.25
    BURN_IN_T: int = 10_000
    BAND_SLACK: float = 0.1
    LEAF_SLACK: float = 0.2
    SMALL_DELTA_TOL: float = 0.01

    # Walk observables
    EXCURSION_MAX_M: int = 64
    XI_FROM: int = 10_000

    # API
    API_MAX_WORK: int = 50_000_000

    model_config = SettingsConfigDict(
        env_file=".env",
        case_sensitive=True,
        extra="ignore"  # Ignore extra fields from .env file
    )


settings = Settings()
