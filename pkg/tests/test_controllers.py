"""
Controller tests: prediction reports, coverage and fuzziness
"""
import numpy as np
import pytest

from common.schemas.bench import RunConfig
from common.schemas.scorer import MeasureKind, ScorerConfig, Variant
from controllers import DEFAULT_EPSILONS, compare_fuzziness, predict_classification, predict_regression, validate_coverage
from controllers.fuzziness import fuzziness_samples
from controllers.predict import dense_grid
from controllers.validate import replicate_seeds
from utils.stats import binomial_upper_band


def _config(**kwargs) -> RunConfig:
    values = dict(p=3, k=3, measures=(MeasureKind.KNN,), n_classes=3)
    values.update(kwargs)
    return RunConfig(**values)


def test_prediction_sets_follow_alphabet_order(make_classification):
    dataset = make_classification(50, n_classes=3, seed=40)
    report = predict_classification(dataset.head(40), dataset.X[40:], ScorerConfig(measure=MeasureKind.KNN, k=3),
                                    Variant.OPTIMIZED, 0.0)
    assert report.n_train == 40
    assert all(row.prediction_set == ["0", "1", "2"] for row in report.rows)


def test_smoothed_predictions_are_seeded(make_classification):
    dataset = make_classification(30, seed=41)
    config = ScorerConfig(measure=MeasureKind.KNN, k=3, seed=5)
    a = predict_classification(dataset.head(25), dataset.X[25:], config, Variant.OPTIMIZED, 0.1, smoothing=True)
    b = predict_classification(dataset.head(25), dataset.X[25:], config, Variant.OPTIMIZED, 0.1, smoothing=True)
    assert a.rows == b.rows


def test_regression_report_with_grid(make_regression):
    dataset = make_regression(40, seed=42)
    report = predict_regression(dataset.head(35), dataset.X[35:], 3, Variant.OPTIMIZED, 0.2, check_grid=True)
    assert report.measure == MeasureKind.KNN
    assert all(row.grid_intervals is not None for row in report.rows)
    icp = predict_regression(dataset.head(35), dataset.X[35:], 3, Variant.ICP, 0.2)
    assert all(len(row.intervals) == 1 for row in icp.rows)


def test_dense_grid_spans_label_range():
    grid = dense_grid(np.array([1.0, 3.0]), step=0.5)
    assert grid[0] == pytest.approx(-1.0)
    assert grid[-1] == pytest.approx(5.0)


def test_validate_coverage_rows():
    report = validate_coverage(_config(), 40, 30, epsilons=(0.1, 0.3))
    assert len(report.rows) == 2
    for row in report.rows:
        assert row.trials == 30
        assert 0 <= row.errors <= 30
        assert row.upper_band > row.epsilon


@pytest.mark.parametrize("variant", [Variant.OPTIMIZED, Variant.ICP])
def test_validate_regression(variant):
    report = validate_coverage(_config(task="regression", p=1), 40, 50, epsilons=(0.2,), variant=variant)
    assert [row.measure for row in report.rows] == [MeasureKind.KNN]


def test_validate_coverage_splits_test_points_over_training_sets():
    report = validate_coverage(_config(), 30, 25, epsilons=(0.2,), training_sets=4)
    assert report.training_sets == 4
    assert report.rows[0].trials == 25
    single = validate_coverage(_config(), 30, 25, epsilons=(0.2,))
    assert single.training_sets == 1


def test_validate_coverage_rejects_bad_training_sets():
    with pytest.raises(ValueError):
        validate_coverage(_config(), 30, 10, training_sets=11)
    with pytest.raises(ValueError):
        validate_coverage(_config(), 30, 10, training_sets=0)


def test_replicate_seeds_are_distinct_and_stable():
    assert replicate_seeds(3, 5) == replicate_seeds(3, 5)
    assert len(set(replicate_seeds(3, 5))) == 5


@pytest.mark.slow
@pytest.mark.parametrize(
    "measure,variant,n_train,trials",
    [
        (MeasureKind.NN, Variant.OPTIMIZED, 500, 2000),
        (MeasureKind.KNN, Variant.OPTIMIZED, 500, 2000),
        (MeasureKind.SIMPLIFIED_KNN, Variant.OPTIMIZED, 500, 2000),
        (MeasureKind.KDE, Variant.OPTIMIZED, 500, 2000),
        (MeasureKind.LSSVM, Variant.OPTIMIZED, 500, 2000),
        (MeasureKind.KNN, Variant.ICP, 500, 2000),
    ],
)
def test_error_rate_within_binomial_band(measure, variant, n_train, trials):
    """
    Error rate at every epsilon is inside the binomial band of `trials` test points

    Four times as many test points are drawn, over 40 training sets, and
    their error rate is held to the band of `trials` points.
    """
    config = _config(measures=(measure,), n_classes=2)
    report = validate_coverage(config, n_train, 4 * trials, variant=variant, seed=11, training_sets=40)
    assert [row.epsilon for row in report.rows] == list(DEFAULT_EPSILONS)
    for row in report.rows:
        assert row.error_rate <= binomial_upper_band(row.epsilon, trials)


def test_fuzziness_samples():
    cp, icp = fuzziness_samples(_config(), MeasureKind.KNN, 40, 20, seed=1)
    assert cp.shape == icp.shape == (20,)
    assert np.all((cp >= 0) & (cp <= 2))
    assert np.all((icp >= 0) & (icp <= 2))


def test_compare_fuzziness_report():
    report = compare_fuzziness(_config(), 40, 20, measures=(MeasureKind.KNN, MeasureKind.KDE))
    assert [row.measure for row in report.rows] == [MeasureKind.KNN, MeasureKind.KDE]
    for row in report.rows:
        assert row.cp_sd >= 0 and row.icp_sd >= 0
        assert row.welch.alpha == 0.01
        assert row.cp_not_worse == (row.cp_mean <= row.icp_mean)
