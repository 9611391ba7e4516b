# treecount/core/config.py
from __future__ import annotations

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", extra="ignore")

    DATABASE_URL: str = "sqlite:///treecount.db"
    CACHE_ENABLED: bool = True
    RECORD_RUNS: bool = True
    ARTIFACT_VERSION: str = "1"

    LOG_LEVEL: str = "INFO"

    # Desk-scale caps
    CENSUS_MAX_N: int = 7
    BALL_MAX_ELEMENTS: int = 10_000_000
    CONGRUENCE_MAX_Q: int = 60
    PRESSURE_MAX_TERMS: int = 10_000_000

    # process pool size for the census scan and threshold bisections; 1 runs inline
    WORKERS: int = 1

    # Certification
    CERT_GRID_CELLS: int = 100_000
    CERT_ROUNDING_FACTOR: float = 1000.0
    POWER_ITER_TOL: float = 1e-13
    POWER_ITER_MAX: int = 10_000
    HURWITZ_TOL: float = 1e-14
    DEFAULT_ORDER: int = 5


settings = Settings()
