"""
Application configuration settings.
"""
from typing import Optional

from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.core.logger import LogLevel


class Tolerances(BaseModel):
    """Numerical tolerances shared by all decompositions."""

    unitarity: float = 1e-10
    reconstruction: float = 1e-9
    kernel: float = 1e-12
    breakdown: float = 1e-8
    degeneracy: float = 1e-12


class Settings(BaseSettings):
    """Application settings."""

    project_name: str = "flagc"
    threads: int = Field(default=1, ge=1)
    max_width: int = 12
    max_mps_length: int = 20
    max_mps_chi: int = 16
    tolerances: Tolerances = Tolerances()

    log_level: LogLevel = LogLevel.WARNING
    log_file_path: Optional[str] = None
    log_json: bool = True

    model_config = SettingsConfigDict(
        env_prefix="FLAGC_",
        env_file=".env",
        env_nested_delimiter="__",
        extra="ignore",
    )


settings = Settings()
