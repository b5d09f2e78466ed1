"""
k-NN CP regression tests

Coefficients, the critical-point sweep against a grid oracle and the
inductive interval baseline
"""
import math

import numpy as np
import pytest

from common.exceptions.conformal import InsufficientDataError
from common.models import Dataset
from controllers.predict import GRID_STEP, dense_grid
from services.regression import (
    KnnRegressor,
    critical_intervals,
    grid_prediction_set,
    icp_regression_calibrate,
    reg_coefficients_baseline,
    reg_coefficients_optimized,
    reg_prediction_set,
    reg_pvalue_at,
    regression_train_optimized,
)
from services.regression.coefficients import nearest, ranked_selection


def _regression(points, labels) -> Dataset:
    return Dataset(X=np.array(points, dtype=float)[:, None], y=np.array(labels, dtype=float), task="regression")


@pytest.fixture
def two_points() -> Dataset:
    """{(0, 0), (10, 10)}"""
    return _regression([0.0, 10.0], [0.0, 10.0])


def test_coefficients_hand_example(two_points):
    """k = 1, x = 5: a = [0, 10], b = [-1, -1], a_test = 0"""
    x = np.array([5.0])
    baseline = reg_coefficients_baseline(two_points, x, 1)
    optimized = reg_coefficients_optimized(regression_train_optimized(two_points, 1), x)
    for coeffs in (baseline, optimized):
        np.testing.assert_array_equal(coeffs.a_train, [0.0, 10.0])
        np.testing.assert_array_equal(coeffs.b_train, [-1.0, -1.0])
        assert coeffs.a_test == 0.0


def test_pvalue_hand_example(two_points):
    coeffs = reg_coefficients_baseline(two_points, np.array([5.0]), 1)
    assert reg_pvalue_at(coeffs, 2, 0.0) == 1.0
    assert reg_pvalue_at(coeffs, 2, 6.0) == pytest.approx(2 / 3)


def test_prediction_set_hand_example(two_points):
    """Row 0 always ties, row 1 holds for y <= 5"""
    coeffs = reg_coefficients_baseline(two_points, np.array([5.0]), 1)
    result = reg_prediction_set(coeffs, 0.9, 2)
    assert result.to_list() == [["-inf", 5.0]]
    assert result.contains(5.0)
    assert not result.contains(5.0001)


def test_small_epsilon_gives_real_line(two_points):
    """epsilon < 1/(n+1) keeps every candidate"""
    coeffs = reg_coefficients_baseline(two_points, np.array([5.0]), 1)
    assert reg_prediction_set(coeffs, 0.2, 2).to_list() == [["-inf", "inf"]]


def test_epsilon_one_gives_empty_set(make_regression):
    regressor = KnnRegressor(make_regression(20, seed=1), k=3)
    assert regressor.predict(np.array([0.3]), 1.0).is_empty


def test_bad_epsilon_rejected(two_points):
    coeffs = reg_coefficients_baseline(two_points, np.array([5.0]), 1)
    with pytest.raises(ValueError):
        reg_prediction_set(coeffs, 1.5, 2)


def test_critical_intervals_k1(two_points):
    coeffs = reg_coefficients_baseline(two_points, np.array([5.0]), 1)
    lo, hi = critical_intervals(coeffs)
    assert (lo[0], hi[0]) == (-math.inf, math.inf)
    assert (lo[1], hi[1]) == (-math.inf, 5.0)


@pytest.mark.parametrize("k", [1, 3, 7])
@pytest.mark.parametrize("seed", [0, 1])
def test_optimized_matches_baseline(make_regression, k, seed):
    """Coefficients and prediction sets are identical"""
    dataset = make_regression(60, p=2, seed=seed)
    baseline = KnnRegressor(dataset, k, optimized=False)
    optimized = KnnRegressor(dataset, k, optimized=True)
    for x in np.random.default_rng(seed).uniform(-1, 1, (5, 2)):
        a, b = baseline.coefficients(x), optimized.coefficients(x)
        np.testing.assert_array_equal(a.a_train, b.a_train)
        np.testing.assert_array_equal(a.b_train, b.b_train)
        assert a.a_test == b.a_test
        for epsilon in (0.05, 0.2, 0.5):
            assert baseline.predict(x, epsilon) == optimized.predict(x, epsilon)


@pytest.mark.parametrize("k", [1, 2, 5])
def test_sweep_agrees_with_pointwise_pvalues(make_regression, k):
    """Membership equals p(y) > epsilon at generic points"""
    dataset = make_regression(40, seed=k)
    regressor = KnnRegressor(dataset, k)
    rng = np.random.default_rng(k)
    for x in rng.uniform(0, 1, (3, 1)):
        coeffs = regressor.coefficients(x)
        for epsilon in (0.1, 0.3):
            result = reg_prediction_set(coeffs, epsilon, dataset.n)
            for y in rng.uniform(dataset.y.min() - 3, dataset.y.max() + 3, 200):
                assert result.contains(y) == (reg_pvalue_at(coeffs, dataset.n, y) > epsilon)


# (p, k, epsilon, n) for twenty random instances
INSTANCES = [
    ((1, 5)[i % 2], (1, 5)[(i // 2) % 2], (0.1, 0.3)[(i // 4) % 2], 40 + 8 * i)
    for i in range(20)
]


@pytest.mark.parametrize("seed,instance", list(enumerate(INSTANCES)))
def test_coefficients_identical_on_random_instances(make_regression, seed, instance):
    p, k, _, n = instance
    dataset = make_regression(n, p=p, seed=100 + seed)
    state = regression_train_optimized(dataset, k)
    for x in np.random.default_rng(seed).standard_normal((3, p)):
        a, b = reg_coefficients_baseline(dataset, x, k), reg_coefficients_optimized(state, x)
        np.testing.assert_array_equal(a.a_train, b.a_train)
        np.testing.assert_array_equal(a.b_train, b.b_train)
        assert a.a_test == b.a_test
        assert a.b_test == b.b_test


@pytest.mark.parametrize("seed,instance", list(enumerate(INSTANCES)))
def test_sweep_matches_grid_oracle(make_regression, seed, instance):
    """Every endpoint within one grid step of the dense-grid set over [min y - range, max y + range]"""
    p, k, epsilon, n = instance
    dataset = make_regression(n, p=p, seed=100 + seed)
    x = np.random.default_rng(seed).standard_normal(p)
    coeffs = KnnRegressor(dataset, k).coefficients(x)
    exact = reg_prediction_set(coeffs, epsilon, dataset.n)
    approx = grid_prediction_set(coeffs, epsilon, dataset.n, dense_grid(dataset.y))
    assert exact.close_to(approx, GRID_STEP)


@pytest.mark.parametrize("seed", range(5))
def test_ranked_selection_breaks_ties_by_index(seed):
    """Row-wise selection picks the same k as nearest; the k-th ranked column comes last"""
    D = np.random.default_rng(seed).integers(0, 4, (6, 9)).astype(float)
    for k in (1, 3, 9):
        idx, last = ranked_selection(D, k)
        for row in range(D.shape[0]):
            expected = nearest(D[row], k)
            np.testing.assert_array_equal(idx[row], np.sort(expected))
            assert last[row] == expected[-1]


def test_displacement_needs_strictly_closer_test_point():
    """d(x, x_i) = Delta_i^k keeps the provisional coefficient"""
    dataset = _regression([0.0, 2.0, 4.0], [0.0, 2.0, 4.0])
    state = regression_train_optimized(dataset, 1)
    tied = np.array([-2.0])
    closer = np.array([-1.9])
    for coeffs in (reg_coefficients_optimized(state, tied), reg_coefficients_baseline(dataset, tied, 1)):
        assert coeffs.b_train[0] == 0.0
    for coeffs in (reg_coefficients_optimized(state, closer), reg_coefficients_baseline(dataset, closer, 1)):
        assert coeffs.b_train[0] == -1.0


def test_too_few_examples():
    dataset = _regression([0.0, 1.0, 2.0], [0.0, 1.0, 2.0])
    with pytest.raises(InsufficientDataError):
        regression_train_optimized(dataset, 3)
    with pytest.raises(InsufficientDataError):
        reg_coefficients_baseline(dataset, np.array([0.5]), 3)


def test_classification_dataset_rejected(toy_1d):
    with pytest.raises(InsufficientDataError):
        regression_train_optimized(toy_1d, 1)


def test_icp_half_width_at_zero_is_max_residual(make_regression):
    regressor = icp_regression_calibrate(make_regression(40, seed=6), 20, 3)
    assert regressor.half_width(0.0) == regressor.residuals.max()
    assert regressor.half_width(0.5) <= regressor.half_width(0.1)


def test_icp_constant_labels_give_point_interval():
    dataset = _regression(np.linspace(0, 1, 20), np.full(20, 3.0))
    result = icp_regression_calibrate(dataset, 10, 2).interval(np.array([0.5]), 0.1)
    assert result.to_list() == [[3.0, 3.0]]


def test_icp_interval_is_centered(make_regression):
    regressor = icp_regression_calibrate(make_regression(50, seed=7), 25, 5)
    x = np.array([0.4])
    interval = regressor.interval(x, 0.2).intervals[0]
    assert (interval.lo + interval.hi) / 2 == pytest.approx(regressor.point_prediction(x))
