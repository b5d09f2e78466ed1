"""
LS-SVM measure tests

Closed-form training, rank-one updates and full-CP equivalence
"""
import numpy as np
import pytest

from common.exceptions.conformal import DegenerateUpdateError, UnsupportedLabelsError
from common.models import Dataset, Example
from common.schemas.scorer import MeasureKind, ScorerConfig, Variant
from services.conformal import classify, observe
from services.measures import build_scorer
from services.measures.distances import FeatureMap, get_feature_map
from services.measures.lssvm import lssvm_decrement, lssvm_fit, lssvm_increment, lssvm_train

IDENTITY_1D = FeatureMap("identity", 1)


def _binary(n: int, q: int, seed: int) -> Dataset:
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, q))
    y = (X @ rng.standard_normal(q) + 0.5 * rng.standard_normal(n) > 0).astype(int)
    return Dataset(X=X, y=y, label_alphabet=("neg", "pos"))


def test_train_single_example():
    """Test w = 1 * (1 + 1)^-1 * 1 for x = 1, y = +1, rho = 1"""
    model = lssvm_fit(np.array([[1.0]]), np.array([1.0]), 1.0, IDENTITY_1D)
    assert model.w[0] == pytest.approx(0.5)
    assert model.C[0, 0] == pytest.approx(0.5)


def test_train_zero_targets():
    rng = np.random.default_rng(0)
    Phi = rng.standard_normal((10, 3))
    model = lssvm_fit(Phi, np.zeros(10), 1.0, FeatureMap("identity", 3))
    np.testing.assert_allclose(model.w, np.zeros(3), atol=1e-15)


def test_primal_and_dual_agree():
    dataset = _binary(8, 5, seed=1)
    config = ScorerConfig(measure=MeasureKind.LSSVM, rho=0.7)
    primal = lssvm_train(dataset, config, form="primal")
    dual = lssvm_train(dataset, config, form="dual")
    np.testing.assert_allclose(primal.w, dual.w, rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(primal.C, dual.C, rtol=1e-9, atol=1e-12)


def test_increment_empty_model():
    """Incrementing w = 0, C = 0 with (1, +1) reproduces the closed form"""
    empty = lssvm_fit(np.zeros((0, 1)), np.zeros(0), 1.0, IDENTITY_1D)
    model = lssvm_increment(empty, Example(np.array([1.0]), 1.0))
    assert model.w[0] == pytest.approx(0.5)
    assert model.n_examples == 1


@pytest.mark.parametrize("seed", range(5))
def test_increment_matches_batch(seed):
    """increment(train(Z), z) ~ train(Z + z) for n = 50, q = 5"""
    dataset = _binary(51, 5, seed)
    config = ScorerConfig(measure=MeasureKind.LSSVM)
    base = lssvm_train(dataset.head(50), config)
    z = dataset.example(50)
    updated = lssvm_increment(base, Example(z.object, 2.0 * z.label - 1.0))
    batch = lssvm_train(dataset, config)
    np.testing.assert_allclose(updated.w, batch.w, rtol=1e-6, atol=1e-10)
    np.testing.assert_allclose(updated.C, batch.C, rtol=1e-6, atol=1e-10)


@pytest.mark.parametrize("seed", range(5))
def test_decrement_matches_batch(seed):
    dataset = _binary(40, 4, seed + 10)
    config = ScorerConfig(measure=MeasureKind.LSSVM)
    full = lssvm_train(dataset, config)
    z = dataset.example(7)
    removed = lssvm_decrement(full, Example(z.object, 2.0 * z.label - 1.0))
    batch = lssvm_train(dataset.without(7), config)
    np.testing.assert_allclose(removed.w, batch.w, rtol=1e-6, atol=1e-10)


def test_increment_decrement_roundtrip():
    dataset = _binary(30, 3, seed=4)
    model = lssvm_train(dataset, ScorerConfig(measure=MeasureKind.LSSVM))
    z = Example(np.array([0.3, -1.2, 0.8]), -1.0)
    back = lssvm_decrement(lssvm_increment(model, z), z)
    np.testing.assert_allclose(back.w, model.w, rtol=1e-6, atol=1e-12)


@pytest.mark.parametrize("case", range(100))
def test_rank_one_updates_on_random_cases(case):
    """Increment, decrement and their roundtrip within 1e-6 relative of retraining, n <= 100, q <= 10"""
    rng = np.random.default_rng(1000 + case)
    n, q = int(rng.integers(2, 101)), int(rng.integers(1, 11))
    dataset = _binary(n, q, seed=2000 + case)
    config = ScorerConfig(measure=MeasureKind.LSSVM)
    full = lssvm_train(dataset, config)

    last = dataset.example(n - 1)
    grown = lssvm_increment(lssvm_train(dataset.head(n - 1), config), Example(last.object, 2.0 * last.label - 1.0))
    np.testing.assert_allclose(grown.w, full.w, rtol=1e-6, atol=1e-10)
    np.testing.assert_allclose(grown.C, full.C, rtol=1e-6, atol=1e-10)

    j = int(rng.integers(0, n))
    z = dataset.example(j)
    shrunk = lssvm_decrement(full, Example(z.object, 2.0 * z.label - 1.0))
    retrained = lssvm_train(dataset.without(j), config)
    np.testing.assert_allclose(shrunk.w, retrained.w, rtol=1e-6, atol=1e-10)
    np.testing.assert_allclose(shrunk.C, retrained.C, rtol=1e-6, atol=1e-10)

    extra = Example(rng.standard_normal(q), float(rng.choice([-1.0, 1.0])))
    back = lssvm_decrement(lssvm_increment(full, extra), extra)
    np.testing.assert_allclose(back.w, full.w, rtol=1e-6, atol=1e-10)
    np.testing.assert_allclose(back.C, full.C, rtol=1e-6, atol=1e-10)


def test_decrement_sole_example():
    model = lssvm_fit(np.array([[1.0]]), np.array([1.0]), 1.0, IDENTITY_1D)
    empty = lssvm_decrement(model, Example(np.array([1.0]), 1.0))
    assert abs(empty.w[0]) <= 1e-6


def test_degenerate_decrement_raises():
    """Removing phi with phi^T phi = rho from the empty model has a zero denominator"""
    empty = lssvm_fit(np.zeros((0, 1)), np.zeros(0), 1.0, IDENTITY_1D)
    with pytest.raises(DegenerateUpdateError):
        lssvm_decrement(empty, Example(np.array([1.0]), 1.0))


def test_more_than_two_labels_rejected():
    dataset = Dataset(X=np.eye(3), y=np.array([0, 1, 2]), label_alphabet=("a", "b", "c"))
    with pytest.raises(UnsupportedLabelsError):
        build_scorer(dataset, ScorerConfig(measure=MeasureKind.LSSVM))


@pytest.mark.parametrize("seed", range(3))
def test_optimized_matches_standard(seed):
    """Scores within 1e-6 relative of full retraining per LOO set, identical p-values"""
    dataset = _binary(60, 3, seed + 20)
    config = ScorerConfig(measure=MeasureKind.LSSVM)
    standard = build_scorer(dataset, config, Variant.STANDARD)
    optimized = build_scorer(dataset, config, Variant.OPTIMIZED)
    for x in np.random.default_rng(seed).standard_normal((2, 3)):
        for label in (0, 1):
            a = standard.score_vector(x, label)
            b = optimized.score_vector(x, label)
            np.testing.assert_allclose(b.training_scores, a.training_scores, rtol=1e-6, atol=1e-9)
            assert b.test_score == pytest.approx(a.test_score, rel=1e-6, abs=1e-12)
            assert standard.pvalue(x, label) == optimized.pvalue(x, label)


def test_label_flip_symmetry():
    """A point at the symmetry center gets equal p-values"""
    X = np.array([[1.0, 0.5], [2.0, 1.0], [-1.0, -0.5], [-2.0, -1.0]])
    dataset = Dataset(X=X, y=np.array([1, 1, 0, 0]), label_alphabet=("neg", "pos"))
    pv = classify(build_scorer(dataset, ScorerConfig(measure=MeasureKind.LSSVM)), np.zeros(2))
    assert pv["neg"] == pytest.approx(pv["pos"])


def test_empty_training_set():
    dataset = Dataset.empty(2, ("neg", "pos"))
    scorer = build_scorer(dataset, ScorerConfig(measure=MeasureKind.LSSVM))
    scores = scorer.score_vector(np.array([1.0, 2.0]), 1)
    assert scores.n == 0
    assert scores.test_score == 0.0
    assert scorer.pvalue(np.array([1.0, 2.0]), 1) == 1.0


def test_observe_matches_retraining():
    dataset = _binary(45, 3, seed=30)
    config = ScorerConfig(measure=MeasureKind.LSSVM)
    scorer = build_scorer(dataset.head(40), config)
    for i in range(40, 45):
        scorer = observe(scorer, dataset.example(i))
    retrained = build_scorer(dataset, config)
    x = np.array([0.2, -0.4, 1.0])
    np.testing.assert_allclose(
        scorer.score_vector(x, 1).training_scores, retrained.score_vector(x, 1).training_scores, rtol=1e-6, atol=1e-10
    )


def test_polynomial_feature_map_dimension():
    fmap = get_feature_map("polynomial", 2, degree=2)
    assert fmap.output_dim == 6
    phi = fmap(np.array([[2.0, 3.0]]))[0]
    np.testing.assert_array_equal(phi, [1.0, 2.0, 3.0, 4.0, 6.0, 9.0])


def test_polynomial_lssvm_matches_standard():
    dataset = _binary(25, 2, seed=31)
    config = ScorerConfig(measure=MeasureKind.LSSVM, feature_map="polynomial", poly_degree=2)
    standard = build_scorer(dataset, config, Variant.STANDARD)
    optimized = build_scorer(dataset, config, Variant.OPTIMIZED)
    x = np.array([0.5, -0.5])
    np.testing.assert_allclose(
        optimized.score_vector(x, 0).training_scores, standard.score_vector(x, 0).training_scores, rtol=1e-6, atol=1e-9
    )
