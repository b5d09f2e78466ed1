"""
Schemas package

Pydantic models for configuration, records and reports
"""
from .bench import BENCH_SCHEMA_VERSION, BenchRecord, RunConfig, log_grid
from .datagen import GenSpec
from .reports import (
    REPORT_SCHEMA_VERSION,
    CoverageReport,
    CoverageRow,
    FuzzinessReport,
    FuzzinessRow,
    PredictionReport,
    PredictionRow,
    SlopeRow,
    WelchResult,
)
from .scorer import MeasureKind, ScorerConfig, Variant

__all__ = [
    "BENCH_SCHEMA_VERSION",
    "BenchRecord",
    "RunConfig",
    "log_grid",
    "GenSpec",
    "REPORT_SCHEMA_VERSION",
    "CoverageReport",
    "CoverageRow",
    "FuzzinessReport",
    "FuzzinessRow",
    "PredictionReport",
    "PredictionRow",
    "SlopeRow",
    "WelchResult",
    "MeasureKind",
    "ScorerConfig",
    "Variant",
]
