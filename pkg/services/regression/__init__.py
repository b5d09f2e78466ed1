"""
Full k-NN CP regression

Baseline and optimized coefficients, the critical-point sweep, a
dense-grid oracle and the inductive interval baseline.
"""
from typing import Optional

import numpy as np

from common.models import Dataset, IntervalSet
from services.regression.coefficients import (
    RegressionCoefficients,
    RegressionKnnState,
    reg_coefficients_baseline,
    reg_coefficients_optimized,
    regression_train_optimized,
)
from services.regression.icp import IcpRegressor, icp_regress, icp_regression_calibrate
from services.regression.sweep import critical_intervals, grid_prediction_set, reg_prediction_set, reg_pvalue_at


class KnnRegressor:
    """
    Full-CP k-NN regressor over a fixed training set

    Args:
        dataset: regression training set
        k: neighbour count
        optimized: precompute the provisional coefficients (O(n) per
            prediction) instead of recomputing neighbourhoods (O(n^2))
    """

    def __init__(self, dataset: Dataset, k: int, optimized: bool = True, distance: str = "euclidean") -> None:
        self.dataset = dataset
        self.k = k
        self.distance = distance
        self.state: Optional[RegressionKnnState] = (
            regression_train_optimized(dataset, k, distance) if optimized else None
        )

    def coefficients(self, test_object: np.ndarray) -> RegressionCoefficients:
        if self.state is not None:
            return reg_coefficients_optimized(self.state, test_object)
        return reg_coefficients_baseline(self.dataset, test_object, self.k, self.distance)

    def predict(self, test_object: np.ndarray, epsilon: float) -> IntervalSet:
        return reg_prediction_set(self.coefficients(test_object), epsilon, self.dataset.n)

    def memory_bytes(self) -> int:
        extra = self.state.nbytes() if self.state is not None else 0
        return int(self.dataset.X.nbytes + self.dataset.y.nbytes + extra)


__all__ = [
    "KnnRegressor",
    "RegressionCoefficients",
    "RegressionKnnState",
    "regression_train_optimized",
    "reg_coefficients_baseline",
    "reg_coefficients_optimized",
    "reg_prediction_set",
    "reg_pvalue_at",
    "critical_intervals",
    "grid_prediction_set",
    "IcpRegressor",
    "icp_regress",
    "icp_regression_calibrate",
]
