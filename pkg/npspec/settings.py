from functools import lru_cache
from typing import Annotated

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Library, CLI and HTTP settings with environment variable support and validation."""

    model_config = SettingsConfigDict(
        env_prefix="NPSPEC_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
        frozen=True,  # Immutable settings for thread safety
    )

    # Worker threads for Galerkin assembly (NPSPEC_THREADS)
    threads: Annotated[int, Field(ge=1, le=256)] = 1

    # Discretization defaults
    degree_cap: Annotated[int, Field(ge=1, le=20)] = 8
    outer_theta: Annotated[int, Field(ge=2, le=512)] = 32
    outer_phi: Annotated[int, Field(ge=2, le=1024)] = 64
    inner_theta: Annotated[int, Field(ge=2, le=512)] = 48
    inner_phi: Annotated[int, Field(ge=2, le=1024)] = 96

    # Geometry
    star_margin: Annotated[float, Field(gt=0.0, lt=1.0)] = 0.9

    # Tolerances
    imag_tol: Annotated[float, Field(gt=0.0, le=1.0)] = 1e-4
    trace_tol: Annotated[float, Field(gt=0.0, le=1.0)] = 1e-8
    fd_gap_tol: Annotated[float, Field(gt=0.0, le=1.0)] = 5e-4
    sum_slope_tol: Annotated[float, Field(gt=0.0, le=1.0)] = 1e-6

    # HTTP result cache
    cache_ttl: Annotated[int, Field(ge=60, le=86400)] = 3600

    # Logging
    log_level: str = "INFO"
    log_format: str = "text"

    # Application settings
    app_name: str = "NP Spectra"
    app_version: str = "1.0.0"
    debug: bool = False

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level."""
        valid_levels = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}
        if v.upper() not in valid_levels:
            raise ValueError(f"Invalid log level. Must be one of: {valid_levels}")
        return v.upper()

    @field_validator("log_format")
    @classmethod
    def validate_log_format(cls, v: str) -> str:
        """Only plain text and one-line JSON records are supported."""
        if v.lower() not in {"text", "json"}:
            raise ValueError("log_format must be 'text' or 'json'")
        return v.lower()


@lru_cache
def get_settings() -> Settings:
    """Cached settings instance for performance."""
    return Settings()


settings = get_settings()
