"""
Conformal core tests

P-values, prediction sets, fuzziness, classify and observe
"""
import numpy as np
import pytest

from common.exceptions.conformal import NotIncrementalError
from common.exceptions.dataset import DimensionMismatchError
from common.models import PValueVector, ScoreVector
from common.schemas.scorer import MeasureKind, ScorerConfig, Variant
from services.conformal import (
    classify,
    classify_batch,
    compute_pvalue,
    compute_smoothed_pvalue,
    fuzziness,
    observe,
    prediction_set,
)
from services.measures import build_scorer


def _scores(training, test):
    return ScoreVector(training_scores=np.array(training, dtype=float), test_score=test)


def test_pvalue_all_ties():
    """Every training score ties the test score"""
    assert compute_pvalue(_scores([2, 2, 2, 2], 2.0)) == 1.0


def test_pvalue_dominating_test_score():
    """A test score above every training score gives 1/(n+1)"""
    assert compute_pvalue(_scores([0.1, 0.2, 0.3, 0.4], 9.0)) == pytest.approx(0.2)


def test_pvalue_counts_ties_as_hits():
    """Test counting alpha_i >= alpha"""
    assert compute_pvalue(_scores([3, 1, 2], 2.0)) == 0.75


def test_pvalue_empty_conditioning_set():
    assert compute_pvalue(_scores([], 1.0)) == 1.0


def test_pvalue_infinite_scores():
    """+inf training scores tie an infinite test score"""
    assert compute_pvalue(_scores([np.inf, 1.0], np.inf)) == pytest.approx(2 / 3)


def test_smoothed_pvalue():
    """Test the smoothed p-value at tau = 1, 0 and 0.5"""
    assert compute_smoothed_pvalue(_scores([2, 2], 2.0), 1.0) == 1.0
    assert compute_smoothed_pvalue(_scores([2, 2], 2.0), 0.0) == 0.0
    assert compute_smoothed_pvalue(_scores([3, 1], 2.0), 0.5) == pytest.approx(0.5)


def test_smoothed_pvalue_rejects_bad_tau():
    with pytest.raises(ValueError):
        compute_smoothed_pvalue(_scores([1.0], 1.0), 1.5)


def test_prediction_set_filters_strictly():
    """Only labels with p > epsilon are kept"""
    pv = PValueVector(labels=("A", "B"), values=np.array([1.0, 0.2]))
    assert prediction_set(pv, 0.5).labels == frozenset({"A"})
    assert prediction_set(pv, 0.2).labels == frozenset({"A"})
    assert len(prediction_set(pv, 1.0)) == 0
    assert prediction_set(pv, 0.0).labels == frozenset({"A", "B"})


def test_prediction_set_rejects_bad_epsilon():
    pv = PValueVector(labels=("A",), values=np.array([1.0]))
    with pytest.raises(ValueError):
        prediction_set(pv, -0.1)


def test_fuzziness():
    """Sum of p-values minus the largest, subtracted once on ties"""
    assert fuzziness(PValueVector(("A", "B", "C"), np.array([1.0, 0.3, 0.1]))) == pytest.approx(0.4)
    assert fuzziness(PValueVector(("A",), np.array([0.7]))) == 0.0
    assert fuzziness(PValueVector(("A", "B"), np.array([0.5, 0.5]))) == pytest.approx(0.5)


def test_classify_nn_hand_example(toy_1d):
    """Test p_A > p_B for x = 0.5 against {(0,A),(1,A),(3,B)}"""
    config = ScorerConfig(measure=MeasureKind.NN)
    for variant in (Variant.STANDARD, Variant.OPTIMIZED):
        pv = classify(build_scorer(toy_1d, config, variant), np.array([0.5]))
        assert pv["A"] == pytest.approx(0.75)
        assert pv["B"] == pytest.approx(0.25)
        assert pv["A"] > pv["B"]


def test_classify_returns_one_pvalue_per_label(make_classification):
    """Shape contract for three labels"""
    dataset = make_classification(30, n_classes=3, seed=3)
    pv = classify(build_scorer(dataset, ScorerConfig(measure=MeasureKind.KNN, k=3)), dataset.X[0] + 0.1)
    assert pv.labels == ("0", "1", "2")
    assert len(pv.per_label) == 3
    assert np.all((pv.values > 0) & (pv.values <= 1))


@pytest.mark.parametrize("measure", [MeasureKind.KNN, MeasureKind.KDE, MeasureKind.LSSVM])
def test_classify_batch_matches_classify(make_classification, measure):
    dataset = make_classification(30, n_classes=3, seed=8)
    scorer = build_scorer(dataset, ScorerConfig(measure=measure, k=3))
    queries = np.random.default_rng(8).standard_normal((4, dataset.dim))
    batch = classify_batch(scorer, queries)
    assert len(batch) == 4
    for pv, x in zip(batch, queries):
        assert pv.labels == dataset.label_alphabet
        np.testing.assert_array_equal(pv.values, classify(scorer, x).values)


def test_classify_batch_rejects_wrong_width(make_classification):
    dataset = make_classification(20, seed=9)
    scorer = build_scorer(dataset, ScorerConfig(measure=MeasureKind.KNN, k=3))
    with pytest.raises(DimensionMismatchError):
        classify_batch(scorer, np.zeros((2, dataset.dim + 1)))


def test_classify_smoothing_needs_rng(toy_1d):
    scorer = build_scorer(toy_1d, ScorerConfig(measure=MeasureKind.NN))
    with pytest.raises(ValueError):
        classify(scorer, np.array([0.5]), smoothing=True)


def test_classify_smoothing_is_seeded(make_classification):
    dataset = make_classification(40, seed=4)
    scorer = build_scorer(dataset, ScorerConfig(measure=MeasureKind.KNN, k=3))
    x = dataset.X[0] * 0.5
    a = classify(scorer, x, smoothing=True, rng=np.random.default_rng(7))
    b = classify(scorer, x, smoothing=True, rng=np.random.default_rng(7))
    np.testing.assert_array_equal(a.values, b.values)
    plain = classify(scorer, x)
    assert np.all(a.values <= plain.values)


def test_observe_matches_retraining(make_classification):
    """observe then classify equals retraining from scratch"""
    dataset = make_classification(60, seed=5)
    config = ScorerConfig(measure=MeasureKind.KNN, k=5)
    scorer = build_scorer(dataset.head(50), config)
    for i in range(50, 60):
        scorer = observe(scorer, dataset.example(i))
    retrained = build_scorer(dataset, config)
    queries = np.random.default_rng(0).standard_normal((5, dataset.dim))
    for x in queries:
        np.testing.assert_array_equal(classify(scorer, x).values, classify(retrained, x).values)


def test_observe_bootstrap_is_not_incremental(make_classification):
    dataset = make_classification(20, seed=6)
    scorer = build_scorer(dataset, ScorerConfig(measure=MeasureKind.BOOTSTRAP, B=3, tree_max_depth=2))
    with pytest.raises(NotIncrementalError):
        observe(scorer, dataset.example(0))


def test_observe_standard_is_not_incremental(toy_1d):
    scorer = build_scorer(toy_1d, ScorerConfig(measure=MeasureKind.NN), Variant.STANDARD)
    with pytest.raises(NotIncrementalError):
        observe(scorer, toy_1d.example(0))
