"""
Library settings and environment variables.

Environment Loading Priority:
1. System environment variables (highest priority)
2. .env file (fallback if system env not set)
3. Field defaults (used if neither above is set)

All variables carry the ``EDGELAB_`` prefix, e.g. ``EDGELAB_N_JOBS=4``.

Usage:
    from edgelab.config import settings

    # Override env file for testing:
    ENV_FILE=.env.test edgelab edges-mc --n 64 --m 256
"""

import os
from enum import Enum
from pathlib import Path

from pydantic import Field, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Environment(str, Enum):
    """Application environment types."""

    DEVELOPMENT = "development"
    TEST = "test"
    PRODUCTION = "production"


class LogLevel(str, Enum):
    """Logging level options."""

    DEBUG = "debug"
    INFO = "info"
    WARN = "warn"
    ERROR = "error"


class UpdateMode(str, Enum):
    """How a rank-one update recomputes the spectrum."""

    FULL = "full"
    INCREMENTAL = "incremental"


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="EDGELAB_",
        env_file=os.getenv("ENV_FILE", ".env"),
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    python_env: Environment = Field(
        default=Environment.DEVELOPMENT, description="The application environment"
    )

    log_level: LogLevel = Field(
        default=LogLevel.INFO, description="The logging level for the library and CLI"
    )

    n_jobs: int | None = Field(
        default=None,
        ge=1,
        description="Worker processes for trial fan-out. If not set, all available cores are used",
    )

    results_dir: Path = Field(
        default=Path("results"),
        description="Directory that relative output paths are resolved against",
    )

    chunk_size: int = Field(
        default=10_000,
        ge=100,
        description="Rows drawn per Monte Carlo chunk when estimating tail probabilities",
    )

    update_mode: UpdateMode = Field(
        default=UpdateMode.FULL,
        description="Default rank-one update path used by the barrier walks",
    )

    @model_validator(mode="after")
    def set_n_jobs_if_not_provided(self) -> "Settings":
        """Use every available core when n_jobs is not set explicitly."""
        if self.n_jobs is None:
            object.__setattr__(self, "n_jobs", os.cpu_count() or 1)
        return self


settings: Settings = Settings()
