"""Configuration management using environment variables."""

from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

# Load environment variables from .env file
load_dotenv()


class Settings(BaseSettings):
    """Application settings loaded from ``SBTM_*`` environment variables."""

    model_config = SettingsConfigDict(env_prefix="SBTM_", case_sensitive=False, extra="ignore")

    # Output
    output_dir: str = Field(default="results", description="Directory for CLI outputs")

    # Fitting defaults (overridden by explicit CLI options)
    default_k_up: int = Field(default=10, ge=1, description="Default maximum number of groups")
    default_restarts: int = Field(default=5, ge=1, description="Default number of restarts")
    default_max_sweeps: int = Field(default=100, ge=1, description="Safety cap on sweeps")
    default_init: str = Field(default="kmeans-profile", description="Initialisation: random or kmeans-profile")
    default_threads: int | None = Field(
        default=None, ge=1, description="Worker threads (None = machine parallelism)"
    )

    # Logging
    log_level: str = Field(default="INFO", description="Logging level")
    log_format: str = Field(default="console", description="Log format (json or console)")
    log_dir: str = Field(default="logs", description="Directory for log files")
    log_to_file: bool = Field(default=False, description="Also write JSON-lines log files")

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level is a valid option."""
        valid_levels = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}
        if v.upper() not in valid_levels:
            raise ValueError(f"log_level must be one of {valid_levels}")
        return v.upper()

    @field_validator("default_init")
    @classmethod
    def validate_default_init(cls, v: str) -> str:
        """Validate the initialisation is a known strategy."""
        if v not in {"random", "kmeans-profile"}:
            raise ValueError("default_init must be 'random' or 'kmeans-profile'")
        return v

    @field_validator("log_format")
    @classmethod
    def validate_log_format(cls, v: str) -> str:
        """Validate log format is a valid option."""
        if v not in {"json", "console"}:
            raise ValueError("log_format must be 'json' or 'console'")
        return v


@lru_cache
def get_settings() -> Settings:
    """
    Get cached settings instance.

    Returns:
        Settings: Application settings.
    """
    return Settings()


def ensure_directories() -> None:
    """Ensure the output directory (and the log directory, if file logging is on) exist."""
    settings = get_settings()

    Path(settings.output_dir).mkdir(parents=True, exist_ok=True)
    if settings.log_to_file:
        Path(settings.log_dir).mkdir(parents=True, exist_ok=True)
