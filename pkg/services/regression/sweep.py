"""
Prediction sets of k-NN CP regression

For each i, {y~ : |a_i + b_i y~| >= |a + y~|} is a closed interval, a
closed ray, the whole line (always tied) or a single point. Sorting the
finite endpoints splits the line into cells on which the count N(y~)
is constant; p(y~) = (N(y~) + 1) / (n + 1).
"""
import logging
import math
from typing import List, Tuple

import numpy as np

from common.models import IntervalSet
from services.regression.coefficients import RegressionCoefficients

logger = logging.getLogger(__name__)


def reg_pvalue_at(coeffs: RegressionCoefficients, n: int, y_tilde: float) -> float:
    """(|{i : |a_i + b_i y~| >= |a + y~|}| + 1) / (n + 1)"""
    train = np.abs(coeffs.a_train + coeffs.b_train * y_tilde)
    test = abs(coeffs.a_test + coeffs.b_test * y_tilde)
    return (int(np.count_nonzero(train >= test)) + 1) / (n + 1)


def critical_intervals(coeffs: RegressionCoefficients) -> Tuple[np.ndarray, np.ndarray]:
    """
    Closed set where alpha_i(y~) >= alpha(y~), as [lo_i, hi_i] with infinite ends allowed

    The two absolute values cross where a_i + b_i y~ = +(a + y~) or
    -(a + y~). With |b_i| < 1 the set lies between both crossings; with
    b_i = -1 (k = 1) there is one crossing and the set is a ray, or the
    whole line when a_i = -a.
    """
    a_i, b_i, a = coeffs.a_train, coeffs.b_train, coeffs.a_test
    lo = np.empty(a_i.shape[0])
    hi = np.empty(a_i.shape[0])

    flat = np.abs(b_i) < 1.0
    c1 = (a - a_i[flat]) / (b_i[flat] - 1.0)
    c2 = -(a + a_i[flat]) / (b_i[flat] + 1.0)
    lo[flat] = np.minimum(c1, c2)
    hi[flat] = np.maximum(c1, c2)

    # b_i = -1: (a_i + a) * (a_i - a - 2 y~) >= 0
    steep = ~flat
    s = a_i[steep] + a
    crossing = 0.5 * (a_i[steep] - a)
    lo[steep] = np.where(s < 0.0, crossing, -np.inf)
    hi[steep] = np.where(s > 0.0, crossing, np.inf)
    return lo, hi


def _cell_bounds(cell: int, points: np.ndarray) -> Tuple[float, float]:
    """Closure of a cell: odd cells are the points, even cells the gaps"""
    m = points.shape[0]
    if cell % 2:
        p = float(points[cell // 2])
        return p, p
    j = cell // 2
    left = -math.inf if j == 0 else float(points[j - 1])
    right = math.inf if j == m else float(points[j])
    return left, right


def reg_prediction_set(coeffs: RegressionCoefficients, epsilon: float, n: int) -> IntervalSet:
    """
    Closure of {y~ : p(y~) > epsilon}, by one sweep over the sorted critical points

    Args:
        coeffs: regression coefficients of one test object
        epsilon: significance level
        n: training set size

    Returns:
        Normalized IntervalSet, rays allowed
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must be in [0, 1], got {epsilon}")
    lo, hi = critical_intervals(coeffs)
    ends = np.concatenate([lo, hi])
    points = np.unique(ends[np.isfinite(ends)])
    m = points.shape[0]
    cells = 2 * m + 1

    def cell_of(values: np.ndarray, default: int) -> np.ndarray:
        idx = np.full(values.shape[0], default, dtype=np.int64)
        finite = np.isfinite(values)
        idx[finite] = 2 * np.searchsorted(points, values[finite]) + 1
        return idx

    diff = np.zeros(cells + 1, dtype=np.int64)
    np.add.at(diff, cell_of(lo, 0), 1)
    np.add.at(diff, cell_of(hi, cells - 1) + 1, -1)
    counts = np.cumsum(diff[:-1])
    qualifies = (counts + 1) / (n + 1) > epsilon

    runs: List[Tuple[float, float]] = []
    start = None
    for cell in range(cells):
        if qualifies[cell] and start is None:
            start = cell
        if start is not None and (cell == cells - 1 or not qualifies[cell + 1]):
            runs.append((_cell_bounds(start, points)[0], _cell_bounds(cell, points)[1]))
            start = None
    logger.debug(f"Regression sweep: n={n}, critical points={m}, runs={len(runs)}")
    return IntervalSet.from_closed(runs)


def grid_prediction_set(coeffs: RegressionCoefficients, epsilon: float, n: int, grid: np.ndarray) -> IntervalSet:
    """
    Dense-grid approximation of reg_prediction_set

    Qualifying runs of grid points become closed intervals; a run that
    reaches either end of the grid is taken as unbounded on that side.
    """
    grid = np.sort(np.asarray(grid, dtype=np.float64))
    train = np.abs(coeffs.a_train[None, :] + coeffs.b_train[None, :] * grid[:, None])
    test = np.abs(coeffs.a_test + coeffs.b_test * grid)
    counts = np.count_nonzero(train >= test[:, None], axis=1)
    qualifies = (counts + 1) / (n + 1) > epsilon

    runs: List[Tuple[float, float]] = []
    last = grid.shape[0] - 1
    start = None
    for j in range(grid.shape[0]):
        if qualifies[j] and start is None:
            start = j
        if start is not None and (j == last or not qualifies[j + 1]):
            lo = -math.inf if start == 0 else float(grid[start])
            hi = math.inf if j == last else float(grid[j])
            runs.append((lo, hi))
            start = None
    return IntervalSet.from_closed(runs)
