"""
Configuration settings for the submodular toolkit.

Uses Pydantic Settings for environment variable management.
"""

import os
from typing import Optional
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings."""

    # Environment
    ENV: str = Field(default="development")
    DEBUG: bool = Field(default=False)
    LOG_LEVEL: str = Field(default="WARNING")

    # Logging Control
    ENABLE_FILE_LOGGING: bool = Field(default=False)
    LOG_DIR: str = Field(default="logs")

    # Application
    APP_NAME: str = Field(default="submodkit")
    VERSION: str = Field(default="1.0.0")

    # Bitset width of SubsetMask; n + r above it is rejected at load time
    MAX_GROUND_SIZE: int = Field(default=128, ge=1)

    # Capability rails
    FF_CAP: int = Field(default=24, ge=0)
    EXHAUSTIVE_CAP: int = Field(default=20, ge=0)
    OPT_REPORT_CAP: int = Field(default=14, ge=0)

    # Evaluation
    EVAL_WORKERS: int = Field(default=1, ge=1)
    PARANOID: bool = Field(default=False)

    # Sampling
    DEFAULT_SEED: int = Field(default=0)
    MONTE_CARLO_SAMPLES: int = Field(default=10000, ge=1)

    # Output formats
    REPORT_SCHEMA_VERSION: str = Field(default="1")
    FIXTURES_DIR: Optional[str] = Field(default=None)

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )


# Create settings instance
settings = Settings()


def get_env_file() -> str:
    """Get the appropriate environment file based on ENV setting."""
    env_file = f".env.{settings.ENV}"
    if os.path.exists(env_file):
        return env_file
    return ".env"


# Update settings with environment-specific file
settings = Settings(_env_file=get_env_file())
