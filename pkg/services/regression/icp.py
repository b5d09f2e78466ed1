"""
Inductive k-NN regression intervals
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from common.exceptions.conformal import InsufficientDataError, InvalidSplitError
from common.models import Dataset, Interval, IntervalSet
from services.measures.distances import get_distance
from services.regression.coefficients import nearest

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class IcpRegressor:
    """
    Attributes:
        proper: proper training set (first t examples)
        residuals: sorted calibration residuals |y_i - y_hat(x_i)|
    """
    proper: Dataset
    residuals: np.ndarray
    k: int
    distance: str = "euclidean"

    def point_prediction(self, test_object: np.ndarray) -> float:
        """Mean label of the k nearest proper-training examples"""
        x = self.proper.check_object(test_object)
        d = get_distance(self.distance)(x[None, :], self.proper.X)[0]
        return math.fsum(self.proper.y[nearest(d, self.k)]) / self.k

    def half_width(self, epsilon: float) -> float:
        """The ceil((1 - eps)(n - t + 1))-th smallest residual, index clamped to 1..n-t"""
        m = self.residuals.shape[0]
        s = math.ceil((1.0 - epsilon) * (m + 1))
        s = min(max(s, 1), m)
        return float(self.residuals[s - 1])

    def interval(self, test_object: np.ndarray, epsilon: float) -> IntervalSet:
        center = self.point_prediction(test_object)
        width = self.half_width(epsilon)
        return IntervalSet((Interval(center - width, center + width),))


def icp_regression_calibrate(
    dataset: Dataset, t: Optional[int], k: int, distance: str = "euclidean"
) -> IcpRegressor:
    """
    Raises:
        InvalidSplitError: unless 1 <= t <= n - 1
        InsufficientDataError: if the proper training set holds fewer than k examples
    """
    n = dataset.n
    if t is None:
        t = n // 2
    if not 1 <= t <= n - 1:
        raise InvalidSplitError(t=t, n=n)
    if t < k:
        raise InsufficientDataError(f"proper training set of {t} examples is smaller than k={k}")
    proper = dataset.head(t)
    calibration = dataset.tail(t)
    D = get_distance(distance)(calibration.X, proper.X)
    predictions = np.array([math.fsum(proper.y[nearest(row, k)]) / k for row in D])
    residuals = np.sort(np.abs(calibration.y - predictions))
    logger.debug(f"ICP regression calibrated: t={t}, n={n}, k={k}")
    return IcpRegressor(proper=proper, residuals=residuals, k=k, distance=distance)


def icp_regress(dataset: Dataset, t: Optional[int], k: int, epsilon: float, test_object: np.ndarray) -> IntervalSet:
    """Single interval y_hat(x) +/- the calibrated residual quantile"""
    return icp_regression_calibrate(dataset, t, k).interval(test_object, epsilon)
