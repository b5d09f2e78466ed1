"""
Report schemas for predict, validate and fuzziness commands
"""
from typing import Dict, List, Optional, Union

from pydantic import BaseModel, Field

from common.schemas.scorer import MeasureKind, Variant

REPORT_SCHEMA_VERSION = 1

Endpoint = Union[float, str]


class PredictionRow(BaseModel):
    """Prediction for one test row"""
    index: int
    p_values: Optional[Dict[str, float]] = None
    prediction_set: Optional[List[str]] = None
    intervals: Optional[List[List[Endpoint]]] = None
    grid_intervals: Optional[List[List[Endpoint]]] = None
    grid_agrees: Optional[bool] = None


class PredictionReport(BaseModel):
    schema_version: int = REPORT_SCHEMA_VERSION
    task: str
    measure: MeasureKind
    variant: Variant
    epsilon: float
    n_train: int
    rows: List[PredictionRow] = Field(default_factory=list)


class CoverageRow(BaseModel):
    """Monte-Carlo coverage at one significance level"""
    measure: MeasureKind
    variant: Variant
    epsilon: float
    trials: int
    errors: int
    error_rate: float
    upper_band: float
    passed: bool


class CoverageReport(BaseModel):
    schema_version: int = REPORT_SCHEMA_VERSION
    n_train: int
    seed: int
    training_sets: int = Field(default=1, ge=1, description="Independent training sets the test points are split over")
    rows: List[CoverageRow] = Field(default_factory=list)


class WelchResult(BaseModel):
    """One-sided Welch test of H0: ICP fuzziness is smaller than CP fuzziness"""
    t_statistic: float
    degrees_of_freedom: float
    p_value: float
    alpha: float
    reject: bool


class FuzzinessRow(BaseModel):
    measure: MeasureKind
    cp_mean: float
    cp_sd: float
    icp_mean: float
    icp_sd: float
    cp_not_worse: bool
    welch: WelchResult


class FuzzinessReport(BaseModel):
    schema_version: int = REPORT_SCHEMA_VERSION
    n_train: int
    n_test: int
    n_classes: int
    seed: int
    rows: List[FuzzinessRow] = Field(default_factory=list)


class SlopeRow(BaseModel):
    """Log-log least-squares slope of a bench series"""
    task: str = "classification"
    measure: MeasureKind
    variant: Variant
    points: int
    n_min: int
    n_max: int
    predict_slope: Optional[float] = None
    train_slope: Optional[float] = None
