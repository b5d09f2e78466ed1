"""
k-NN regression coefficients

For a test object x and candidate target y~, the scores of the
augmented set are alpha_i(y~) = |a_i + b_i y~| and alpha(y~) = |a + y~|:

    b_i = -1/k and a_i = y_i - (1/k) * (sum of the k-1 nearest labels)
        when x is one of x_i's k nearest neighbours in Z minus i plus x
    b_i = 0 and a_i = y_i - (1/k) * (sum of the k nearest labels) otherwise
    a = -(1/k) * (sum of the labels of x's k nearest neighbours in Z)

Neighbours are ranked by (distance, index) and the test object carries
the largest index, so it never wins a distance tie.
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from common.exceptions.conformal import InsufficientDataError
from common.models import Dataset
from services.measures.distances import get_distance
from utils.numerics import multiset_row_sums

logger = logging.getLogger(__name__)

_BLOCK_ELEMENTS = 1 << 22


@dataclass(frozen=True, eq=False)
class RegressionCoefficients:
    """alpha_i(y~) = |a_i + b_i y~|, alpha(y~) = |a + b y~| with b = 1"""
    a_train: np.ndarray
    b_train: np.ndarray
    a_test: float
    b_test: float = 1.0

    @property
    def n(self) -> int:
        return int(self.a_train.shape[0])


def nearest(dists: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k smallest entries ranked by (distance, index)"""
    k = min(k, dists.shape[0])
    if k == 0:
        return np.zeros(0, dtype=np.int64)
    kth = np.partition(dists, k - 1)[k - 1]
    candidates = np.flatnonzero(dists <= kth)
    return candidates[np.argsort(dists[candidates], kind="stable")][:k]


def ranked_selection(D: np.ndarray, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Row-wise version of nearest for a block of distance rows

    Every row must hold at least k finite entries.

    Returns:
        (idx, last): (b, k) column indices of each row's k nearest in
        increasing index order, and (b,) the column ranked k-th
    """
    b = D.shape[0]
    kth = np.partition(D, k - 1, axis=1)[:, k - 1]
    less = D < kth[:, None]
    ties = D == kth[:, None]
    room = k - less.sum(axis=1)
    tie_rank = np.cumsum(ties, axis=1)
    chosen = less | (ties & (tie_rank <= room[:, None]))
    last = np.argmax(ties & (tie_rank == room[:, None]), axis=1)
    return np.nonzero(chosen)[1].reshape(b, k), last


def _check_size(dataset: Dataset, k: int) -> None:
    if dataset.task != "regression":
        raise InsufficientDataError("k-NN regression needs a regression dataset")
    if dataset.n < k + 1:
        raise InsufficientDataError(f"k-NN regression needs n >= k + 1, got n={dataset.n}, k={k}")


def _label_mean(labels: np.ndarray, k: int) -> float:
    return float(multiset_row_sums(labels)[0][0]) / k


def query_coefficient(dataset: Dataset, x: np.ndarray, k: int, distance: str = "euclidean") -> float:
    """a = -(1/k) * sum of the labels of x's k nearest neighbours in Z"""
    d = get_distance(distance)(x[None, :], dataset.X)[0]
    return -_label_mean(dataset.y[nearest(d, k)], k)


def reg_coefficients_baseline(
    dataset: Dataset, test_object: np.ndarray, k: int, distance: str = "euclidean"
) -> RegressionCoefficients:
    """
    Recompute every neighbourhood in the augmented set from scratch

    Raises:
        InsufficientDataError: if n < k + 1
    """
    _check_size(dataset, k)
    x = dataset.check_object(test_object)
    n = dataset.n
    X_aug = np.vstack([dataset.X, x[None, :]])
    # the test object takes the last index and an infinite label, which row sums skip
    y_aug = np.append(dataset.y, np.inf)
    a = np.empty(n)
    b = np.zeros(n)
    block = max(1, _BLOCK_ELEMENTS // (n + 1))
    for start in range(0, n, block):
        stop = min(n, start + block)
        D = get_distance(distance)(dataset.X[start:stop], X_aug)
        D[np.arange(stop - start), np.arange(start, stop)] = np.inf
        idx, _ = ranked_selection(D, k)
        sums, _ = multiset_row_sums(y_aug[idx])
        a[start:stop] = dataset.y[start:stop] - sums / k
        b[start:stop] = np.where((idx == n).any(axis=1), -1.0 / k, 0.0)
    return RegressionCoefficients(a_train=a, b_train=b, a_test=query_coefficient(dataset, x, k, distance))


# ==================== Optimized state ====================
@dataclass(frozen=True, eq=False)
class RegressionKnnState:
    """
    Attributes:
        label_sum: S_i, sum of the k nearest labels in Z minus i
        kth_label: y_(k)(x_i)
        kth_distance: Delta_i^k
        a_prime: y_i - S_i / k, the coefficient when x is not a neighbour
        a_displaced: y_i - (sum of the k-1 nearest labels) / k
    """
    dataset: Dataset
    k: int
    distance: str
    label_sum: np.ndarray
    kth_label: np.ndarray
    kth_distance: np.ndarray
    a_prime: np.ndarray
    a_displaced: np.ndarray

    def nbytes(self) -> int:
        arrays = (self.label_sum, self.kth_label, self.kth_distance, self.a_prime, self.a_displaced)
        return int(sum(a.nbytes for a in arrays))


def regression_train_optimized(dataset: Dataset, k: int, distance: str = "euclidean") -> RegressionKnnState:
    """
    One-off O(n^2) pass over Z computing each example's k nearest neighbours

    Raises:
        InsufficientDataError: if n < k + 1
    """
    _check_size(dataset, k)
    n = dataset.n
    y = dataset.y
    label_sum = np.empty(n)
    displaced_sum = np.empty(n)
    kth_label = np.empty(n)
    kth_distance = np.empty(n)
    block = max(1, _BLOCK_ELEMENTS // n)
    for start in range(0, n, block):
        stop = min(n, start + block)
        rows = np.arange(stop - start)
        D = get_distance(distance)(dataset.X[start:stop], dataset.X)
        D[rows, np.arange(start, stop)] = np.inf
        idx, last = ranked_selection(D, k)
        labels = y[idx]
        label_sum[start:stop], _ = multiset_row_sums(labels)
        displaced_sum[start:stop], _ = multiset_row_sums(np.where(idx == last[:, None], np.inf, labels))
        kth_label[start:stop] = y[last]
        kth_distance[start:stop] = D[rows, last]
    a_prime = y - label_sum / k
    a_displaced = y - displaced_sum / k
    logger.debug(f"Regression state trained: n={n}, k={k}")
    return RegressionKnnState(dataset, k, distance, label_sum, kth_label, kth_distance, a_prime, a_displaced)


def reg_coefficients_optimized(state: RegressionKnnState, test_object: np.ndarray) -> RegressionCoefficients:
    """
    O(n) update of the provisional coefficients

    Row i switches to the displaced coefficients only when
    d(x, x_i) < Delta_i^k strictly.
    """
    dataset = state.dataset
    x = dataset.check_object(test_object)
    d = get_distance(state.distance)(x[None, :], dataset.X)[0]
    displaced = d < state.kth_distance
    a = np.where(displaced, state.a_displaced, state.a_prime)
    b = np.where(displaced, -1.0 / state.k, 0.0)
    a_test = -_label_mean(dataset.y[nearest(d, state.k)], state.k)
    return RegressionCoefficients(a_train=a, b_train=b, a_test=a_test)
