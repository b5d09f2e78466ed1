"""
Configuration module for engine and harness settings

"""
from pathlib import Path
from typing import Any, Dict, Optional, Union

from dotenv import dotenv_values, load_dotenv
from pydantic import Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

# Load environment variables
load_dotenv()


class Settings(BaseSettings):
    """
    Engine and harness settings

    - Automatic environment variable parsing
    - Type validation at startup (fail fast)
    - Defaults follow the published hyperparameter table
    - Easy testing with overrides (see load_settings)
    """

    # ==================== Application ====================
    APP_NAME: str = Field(
        default="conformal-engine",
        description="Application name"
    )
    APP_VERSION: str = Field(
        default="1.0.0",
        description="Application version"
    )
    ENVIRONMENT: str = Field(
        default="development",
        description="Environment: development, production"
    )
    LOG_LEVEL: str = Field(
        default="INFO",
        description="Logging level: DEBUG, INFO, WARNING, ERROR, CRITICAL"
    )

    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Reject unknown level names early"""
        level = v.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"Unknown LOG_LEVEL: {v}")
        return level

    # ==================== Reports ====================
    REPORT_DIR: Path = Field(
        default=Path("./reports"),
        description="Directory where bench CSVs and JSON reports are written"
    )

    # ==================== Measure Defaults ====================
    DEFAULT_K: int = Field(
        default=15, ge=1,
        description="Neighbour count for the k-NN family"
    )
    DEFAULT_BANDWIDTH: float = Field(
        default=1.0, gt=0,
        description="KDE bandwidth h"
    )
    DEFAULT_RHO: float = Field(
        default=1.0, gt=0,
        description="LS-SVM regularizer rho"
    )
    DEFAULT_ENSEMBLE_SIZE: int = Field(
        default=10, ge=1,
        description="Bootstrap ensemble size B"
    )
    DEFAULT_TREE_MAX_DEPTH: int = Field(
        default=10, ge=0,
        description="Maximum depth of the bootstrap base trees"
    )

    # ==================== Protocol ====================
    ICP_TRAIN_FRACTION: float = Field(
        default=0.5, gt=0, lt=1,
        description="Fraction t/n of examples used as ICP proper training set"
    )
    FEATURE_DIM: int = Field(
        default=30, ge=1,
        description="Feature dimension p of generated datasets"
    )
    BENCH_TIMEOUT_SECONDS: float = Field(
        default=60.0, gt=0,
        description="Per-cell timeout, checked before every timed batch"
    )
    BENCH_BATCH_SIZE: int = Field(
        default=50, ge=1,
        description="Test points per timed batch for optimized k-NN and KDE scorers"
    )
    BENCH_TEST_POINTS: int = Field(
        default=100, ge=1,
        description="Test points per bench cell"
    )
    BENCH_SEEDS: int = Field(
        default=5, ge=1,
        description="Repeat seeds per bench cell"
    )
    BENCH_N_MIN: int = Field(default=10, ge=1, description="Smallest training size of the bench grid")
    BENCH_N_MAX: int = Field(default=100_000, ge=1, description="Largest training size of the bench grid")
    BENCH_N_POINTS: int = Field(default=13, ge=1, description="Number of log-spaced grid values")
    VALIDATION_TEST_POINTS: int = Field(
        default=2000, ge=1,
        description="Test points for Monte-Carlo coverage validation"
    )
    VALIDATION_TRAINING_SETS: int = Field(
        default=20, ge=1,
        description="Independent training sets the validation test points are spread over"
    )
    WELCH_ALPHA: float = Field(
        default=0.01, gt=0, lt=1,
        description="Rejection threshold of the one-sided Welch test"
    )

    @model_validator(mode="after")
    def validate_grid(self) -> "Settings":
        """Bench grid bounds must be increasing"""
        if self.BENCH_N_MAX < self.BENCH_N_MIN:
            raise ValueError("BENCH_N_MAX must be >= BENCH_N_MIN")
        return self

    # ==================== Configuration ====================
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore"
    )


def load_settings(config_file: Optional[Union[str, Path]] = None, **overrides: Any) -> Settings:
    """
    Build settings, letting a key=value config file override defaults

    Args:
        config_file: Optional path to a key=value file (same syntax as .env)
        **overrides: Explicit overrides, applied last

    Returns:
        Validated Settings instance
    """
    values: Dict[str, Any] = {}
    if config_file is not None:
        values.update({k: v for k, v in dotenv_values(config_file).items() if v is not None})
    values.update(overrides)
    return Settings(**values)


settings = Settings()
