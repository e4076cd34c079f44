from typing import Literal

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Application settings
    app_name: str = "Constrained Stable Matching Solver"
    app_version: str = "1.0.0"
    environment: str = "development"
    debug: bool = False

    # Logging settings
    log_level: str = "INFO"
    log_format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    # Oracle settings
    oracle_max_candidates: int = 10_000_000

    # Enumeration settings
    default_mode: Literal["all", "worker-opt", "firm-opt"] = "all"
    enumeration_parallel: bool = False
    enumeration_workers: int = 4

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="STABLEMATCH_",
        case_sensitive=False,
    )


# Global settings instance
settings = Settings()
