"""
Depth-limited CART classifier used as the bootstrap base learner

Greedy Gini splits over a random feature subset per node; leaves hold
label frequencies. Nodes are stored in flat arrays.
"""
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from common.models import Dataset
from common.schemas.scorer import ScorerConfig

LEAF = -1


@dataclass(frozen=True, eq=False)
class DecisionTree:
    """
    Attributes:
        feature: split feature per node, LEAF for leaves
        threshold: go left when x[feature] <= threshold
        left / right: child node ids
        value: (nodes, n_labels) label frequencies
    """
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def node_count(self) -> int:
        return int(self.feature.shape[0])

    @property
    def depth(self) -> int:
        depths = np.zeros(self.node_count, dtype=np.int64)
        for node in range(self.node_count):
            if self.feature[node] != LEAF:
                depths[self.left[node]] = depths[self.right[node]] = depths[node] + 1
        return int(depths.max())

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf id reached by every row"""
        X = np.atleast_2d(X)
        nodes = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature[nodes] != LEAF
        while active.any():
            rows = np.flatnonzero(active)
            cur = nodes[rows]
            go_left = X[rows, self.feature[cur]] <= self.threshold[cur]
            nodes[rows] = np.where(go_left, self.left[cur], self.right[cur])
            active = self.feature[nodes] != LEAF
        return nodes

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def nbytes(self) -> int:
        return int(sum(a.nbytes for a in (self.feature, self.threshold, self.left, self.right, self.value)))


def _best_split(X: np.ndarray, y: np.ndarray, n_labels: int, features: np.ndarray) -> Optional[Tuple[int, float]]:
    """Lowest weighted Gini over the given features; first feature in draw order wins ties"""
    n = y.shape[0]
    best: Optional[Tuple[float, int, float]] = None
    for f in features:
        order = np.argsort(X[:, f], kind="stable")
        values = X[order, f]
        valid = values[:-1] < values[1:]
        if not valid.any():
            continue
        onehot = np.eye(n_labels)[y[order]]
        left = np.cumsum(onehot, axis=0)[:-1]
        right = left[-1] + onehot[-1] - left
        n_left = np.arange(1, n, dtype=np.float64)
        n_right = n - n_left
        gini_left = 1.0 - np.sum(left ** 2, axis=1) / n_left ** 2
        gini_right = 1.0 - np.sum(right ** 2, axis=1) / n_right ** 2
        impurity = np.where(valid, (n_left * gini_left + n_right * gini_right) / n, np.inf)
        pos = int(np.argmin(impurity))
        if best is None or impurity[pos] < best[0]:
            threshold = 0.5 * (values[pos] + values[pos + 1])
            if threshold >= values[pos + 1]:
                threshold = values[pos]
            best = (float(impurity[pos]), int(f), float(threshold))
    if best is None:
        return None
    return best[1], best[2]


def fit_tree(
    X: np.ndarray,
    y: np.ndarray,
    n_labels: int,
    max_depth: int,
    features_per_split: int,
    rng: np.random.Generator,
) -> DecisionTree:
    """
    Grow a tree on (X, y)

    A node splits whenever it is impure, above max_depth and some drawn
    feature separates its rows, even if the split does not lower the
    impurity (XOR-like data has no first-level gain).
    """
    if X.shape[0] == 0:
        raise ValueError("cannot grow a tree on an empty sample")
    p = X.shape[1]
    mtry = max(1, min(features_per_split, p))
    feature: List[int] = []
    threshold: List[float] = []
    left: List[int] = []
    right: List[int] = []
    value: List[np.ndarray] = []

    def new_node(counts: np.ndarray) -> int:
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(counts / counts.sum())
        return len(feature) - 1

    root = new_node(np.bincount(y, minlength=n_labels).astype(np.float64))
    stack = [(root, np.arange(X.shape[0]), 0)]
    while stack:
        node, rows, depth = stack.pop()
        counts = np.bincount(y[rows], minlength=n_labels)
        if depth >= max_depth or np.count_nonzero(counts) <= 1:
            continue
        drawn = rng.choice(p, size=mtry, replace=False)
        split = _best_split(X[rows], y[rows], n_labels, drawn)
        if split is None:
            continue
        f, t = split
        go_left = X[rows, f] <= t
        feature[node], threshold[node] = f, t
        left_rows, right_rows = rows[go_left], rows[~go_left]
        left[node] = new_node(np.bincount(y[left_rows], minlength=n_labels).astype(np.float64))
        right[node] = new_node(np.bincount(y[right_rows], minlength=n_labels).astype(np.float64))
        stack.append((right[node], right_rows, depth + 1))
        stack.append((left[node], left_rows, depth + 1))

    return DecisionTree(
        feature=np.asarray(feature, dtype=np.int64),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        value=np.vstack(value),
    )


def tree_train(sample: Dataset, config: ScorerConfig, rng: np.random.Generator) -> DecisionTree:
    """Grow a tree with the configured depth and sqrt(p) feature subsets"""
    return fit_tree(
        sample.X,
        sample.y,
        sample.n_labels,
        config.tree_max_depth,
        config.features_per_split(sample.dim),
        rng,
    )


def tree_predict(tree: DecisionTree, obj: np.ndarray) -> np.ndarray:
    """Confidence vector (label frequencies of the reached leaf)"""
    return tree.predict_proba(np.asarray(obj, dtype=np.float64).reshape(1, -1))[0]
