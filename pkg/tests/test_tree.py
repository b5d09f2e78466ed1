"""
Decision tree tests
"""
import numpy as np
import pytest

from common.models import Dataset
from common.schemas.scorer import MeasureKind, ScorerConfig
from services.measures.tree import fit_tree, tree_predict, tree_train

XOR_X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
XOR_Y = np.array([0, 1, 1, 0])


def test_pure_sample_is_single_leaf():
    """A pure sample gives a depth-0 tree with a one-hot confidence vector"""
    X = np.random.default_rng(0).standard_normal((10, 3))
    tree = fit_tree(X, np.ones(10, dtype=np.int64), 3, max_depth=5, features_per_split=3, rng=np.random.default_rng(1))
    assert tree.node_count == 1
    assert tree.depth == 0
    np.testing.assert_array_equal(tree_predict(tree, X[0]), [0.0, 1.0, 0.0])


def test_xor_is_fit_exactly():
    tree = fit_tree(XOR_X, XOR_Y, 2, max_depth=2, features_per_split=2, rng=np.random.default_rng(0))
    predicted = tree.predict_proba(XOR_X).argmax(axis=1)
    assert np.mean(predicted == XOR_Y) == 1.0
    assert tree.depth == 2


def test_depth_zero_holds_label_frequencies():
    tree = fit_tree(XOR_X, np.array([0, 0, 0, 1]), 2, max_depth=0, features_per_split=2, rng=np.random.default_rng(0))
    assert tree.node_count == 1
    np.testing.assert_allclose(tree_predict(tree, np.array([5.0, 5.0])), [0.75, 0.25])


def test_max_depth_is_respected():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((200, 4))
    y = rng.integers(0, 3, 200)
    tree = fit_tree(X, y, 3, max_depth=3, features_per_split=2, rng=rng)
    assert tree.depth <= 3
    proba = tree.predict_proba(X)
    np.testing.assert_allclose(proba.sum(axis=1), np.ones(200))


def test_constant_features_cannot_split():
    X = np.ones((6, 2))
    tree = fit_tree(X, np.array([0, 1, 0, 1, 0, 1]), 2, max_depth=4, features_per_split=2, rng=np.random.default_rng(0))
    assert tree.node_count == 1


def test_empty_sample_rejected():
    with pytest.raises(ValueError):
        fit_tree(np.zeros((0, 2)), np.zeros(0, dtype=np.int64), 2, 3, 1, np.random.default_rng(0))


def test_tree_train_is_seeded():
    rng = np.random.default_rng(4)
    dataset = Dataset(X=rng.standard_normal((50, 9)), y=rng.integers(0, 2, 50), label_alphabet=("a", "b"))
    config = ScorerConfig(measure=MeasureKind.BOOTSTRAP, tree_max_depth=4)
    a = tree_train(dataset, config, np.random.default_rng(11))
    b = tree_train(dataset, config, np.random.default_rng(11))
    np.testing.assert_array_equal(a.feature, b.feature)
    np.testing.assert_array_equal(a.threshold, b.threshold)
