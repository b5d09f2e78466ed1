"""
Inductive conformal prediction tests
"""
import numpy as np
import pytest

from common.exceptions.conformal import InvalidSplitError
from common.schemas.scorer import MeasureKind, ScorerConfig
from services.icp import calibration_pvalues, icp_calibrate, icp_classify, icp_pvalue, split_size


def test_calibration_size(make_classification):
    """n = 4, t = 2 leaves two calibration scores"""
    dataset = make_classification(4, seed=1)
    calib = icp_calibrate(dataset, 2, ScorerConfig(measure=MeasureKind.NN))
    assert calib.calibration_scores.shape == (2,)
    assert calib.proper.n == 2


def test_default_split_is_half(make_classification):
    calib = icp_calibrate(make_classification(11, seed=2), None, ScorerConfig(measure=MeasureKind.NN))
    assert calib.t == 5
    assert calib.calibration_scores.shape == (6,)


@pytest.mark.parametrize("t", [0, 4, 5])
def test_invalid_split(make_classification, t):
    with pytest.raises(InvalidSplitError):
        icp_calibrate(make_classification(4, seed=3), t, ScorerConfig(measure=MeasureKind.NN))


def test_calibration_pvalues():
    cal = np.array([0.1, 0.2, 0.3])
    assert calibration_pvalues(cal, np.array([5.0]))[0] == pytest.approx(1 / 4)
    assert calibration_pvalues(cal, np.array([-5.0]))[0] == 1.0
    assert calibration_pvalues(np.array([1.0, 3.0]), np.array([2.0]))[0] == pytest.approx(2 / 3)


def test_calibration_pvalues_count_ties():
    assert calibration_pvalues(np.array([1.0, 2.0, 2.0]), np.array([2.0]))[0] == pytest.approx(3 / 4)


def test_split_size():
    assert split_size(100, 0.5) == 50
    assert split_size(2, 0.99) == 1
    assert split_size(10, 0.0) == 1


@pytest.mark.parametrize("measure", list(MeasureKind))
def test_every_measure_runs_through_icp(make_classification, measure):
    dataset = make_classification(40, n_classes=2, seed=4)
    config = ScorerConfig(measure=measure, k=3, B=3, tree_max_depth=3)
    calib = icp_calibrate(dataset, 25, config)
    pv = icp_classify(calib, dataset.X[0] + 0.05)
    assert pv.labels == dataset.label_alphabet
    assert np.all((pv.values >= 1 / 16) & (pv.values <= 1.0))
    for label in range(dataset.n_labels):
        assert icp_pvalue(calib, dataset.X[0] + 0.05, label) == pytest.approx(pv.values[label])


def test_icp_is_deterministic(make_classification):
    dataset = make_classification(30, seed=5)
    config = ScorerConfig(measure=MeasureKind.BOOTSTRAP, B=4, tree_max_depth=2, seed=9)
    a = icp_calibrate(dataset, 15, config)
    b = icp_calibrate(dataset, 15, config)
    np.testing.assert_array_equal(a.calibration_scores, b.calibration_scores)
