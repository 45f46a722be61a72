"""
Runtime settings for mlbgg.

Uses Pydantic Settings to load run-level knobs (seed override, worker count,
logging) from environment variables and .env files. Scenario parameters live in
the YAML experiment file, not here.
"""

from pathlib import Path
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class RuntimeSettings(BaseSettings):
    """Environment-level configuration for simulation runs."""

    model_config = SettingsConfigDict(
        env_prefix="MLBGG_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    seed: Optional[int] = Field(
        default=None,
        description="Root seed override (takes precedence over the config file)",
        ge=0,
        lt=2**64,
    )
    workers: int = Field(
        default=1,
        description="Number of worker processes for trial fan-out",
        ge=1,
    )
    log_level: str = Field(
        default="INFO",
        description="Minimum log level",
        pattern="^(DEBUG|INFO|WARNING|ERROR)$",
    )
    log_json: bool = Field(
        default=False,
        description="Render console logs as JSON lines",
    )
    output_dir: Optional[Path] = Field(
        default=None,
        description="Default output directory when --out is not given",
    )
    censor_warning_rate: float = Field(
        default=0.05,
        description="Censor rate above which a warning is logged",
        ge=0.0,
        le=1.0,
    )


# Convenience function to load settings
def load_settings(env_file: Optional[str] = None) -> RuntimeSettings:
    """
    Load runtime settings from environment.

    Args:
        env_file: Optional path to .env file

    Returns:
        RuntimeSettings instance
    """
    if env_file:
        return RuntimeSettings(_env_file=env_file)  # type: ignore[call-arg]
    return RuntimeSettings()
