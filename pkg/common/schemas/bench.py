"""
Benchmark configuration and record schemas
"""
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from common.schemas.scorer import MeasureKind, Variant

BENCH_SCHEMA_VERSION = 1


def log_grid(n_min: int, n_max: int, points: int) -> List[int]:
    """Integer log-spaced grid, duplicates removed"""
    values = np.logspace(np.log10(n_min), np.log10(n_max), points)
    return sorted({int(round(float(v))) for v in values})


class RunConfig(BaseModel):
    """Bench, validation and fuzziness run parameters"""
    model_config = ConfigDict(frozen=True)

    task: Literal["classification", "regression"] = Field(default="classification")
    n_grid: Tuple[int, ...] = Field(default_factory=lambda: tuple(log_grid(10, 100_000, 13)))
    test_points: int = Field(default=100, ge=1)
    timeout_seconds: float = Field(default=60.0, gt=0)
    seeds: Tuple[int, ...] = Field(default=(0, 1, 2, 3, 4))
    measures: Tuple[MeasureKind, ...] = Field(default=(MeasureKind.SIMPLIFIED_KNN,))
    variants: Tuple[Variant, ...] = Field(default=(Variant.STANDARD, Variant.OPTIMIZED))
    p: int = Field(default=30, ge=1)
    n_classes: int = Field(default=2, ge=2)
    class_sep: float = Field(default=2.0, ge=0)
    k: int = Field(default=15, ge=1)
    h: float = Field(default=1.0, gt=0)
    rho: float = Field(default=1.0, gt=0)
    B: int = Field(default=10, ge=1)
    tree_max_depth: int = Field(default=10, ge=0)
    train_fraction: float = Field(default=0.5, gt=0, lt=1)
    epsilon: float = Field(default=0.1, ge=0, le=1, description="Significance level of timed regression predictions")
    batch_size: int = Field(default=50, ge=1, description="Test points per timed batch of batch-capable scorers")
    parallel: bool = Field(default=False, description="Parallel prediction over (test point, label) pairs")

    @field_validator("n_grid")
    @classmethod
    def validate_grid(cls, v: Tuple[int, ...]) -> Tuple[int, ...]:
        """Grid values must be positive and strictly increasing"""
        if not v:
            raise ValueError("n_grid must not be empty")
        if any(n <= 0 for n in v) or any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("n_grid values must be positive and increasing")
        return v


class BenchRecord(BaseModel):
    """One benchmark cell"""
    schema_version: int = BENCH_SCHEMA_VERSION
    task: str = "classification"
    measure: MeasureKind
    variant: Variant
    n: int = Field(..., ge=1)
    seed: int
    train_seconds: float = Field(..., ge=0)
    mean_predict_seconds: float = Field(..., ge=0)
    predictions_completed: int = Field(..., ge=0)
    predictions_requested: int = Field(..., ge=0)
    timed_out: bool = False
    state_bytes: int = Field(default=0, ge=0)
    bootstrap_draws: Optional[int] = None
    error: Optional[str] = None

    @classmethod
    def csv_columns(cls) -> List[str]:
        return list(cls.model_fields.keys())
