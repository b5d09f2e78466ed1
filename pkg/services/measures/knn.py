"""
Nearest-neighbour nonconformity measures

NN, k-NN and Simplified k-NN share one implementation: NN is k-NN with
k = 1 and Simplified k-NN keeps only the same-label numerator.

Degenerate conventions (shared by standard and optimized scoring):
    - Simplified: no same-label candidate -> +inf
    - Full: both categories empty -> 0; numerator empty -> +inf;
      denominator empty -> 0; zero denominator sum -> +inf if the
      numerator is positive, 1.0 otherwise

Distance sums depend only on the multiset of selected distances, so the
optimized update reproduces the literal recomputation bit for bit.
"""
import logging
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Callable, Optional, Tuple

import numpy as np

from common.models import Dataset, Example, ScoreVector
from common.schemas.scorer import MeasureKind, ScorerConfig
from services.measures.base import NonconformityMeasure, NonconformityScorer
from services.measures.distances import DistanceFn, get_distance
from utils.numerics import multiset_row_sums

logger = logging.getLogger(__name__)

# rows of the pairwise distance block kept in memory at once during training
_BLOCK_ELEMENTS = 1 << 22


# ==================== Shared scoring ====================
def _k_smallest(D: np.ndarray, k: int) -> np.ndarray:
    """Sorted k smallest entries per row, padded with +inf"""
    m, n = D.shape
    if n > k:
        part = np.partition(D, k - 1, axis=1)[:, :k]
    else:
        part = np.concatenate([D, np.full((m, k - n), np.inf)], axis=1)
    return np.sort(part, axis=1)


def _ratio(num_sum: np.ndarray, num_count: np.ndarray, den_sum: np.ndarray, den_count: np.ndarray) -> np.ndarray:
    no_num = num_count == 0
    no_den = den_count == 0
    zero_den = den_sum == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = num_sum / den_sum
    # first matching condition wins
    return np.select(
        [no_num & no_den, no_num, no_den, zero_den & (num_sum > 0.0), zero_den],
        [0.0, np.inf, 0.0, np.inf, 1.0],
        default=ratio,
    )


def _simplified(num_sum: np.ndarray, num_count: np.ndarray) -> np.ndarray:
    return np.where(num_count > 0, num_sum, np.inf)


def _scores_from_distances(
    D: np.ndarray, cond_labels: np.ndarray, labels: np.ndarray, k: int, simplified: bool
) -> np.ndarray:
    """Scores of m examples given their (m, n) distances to the conditioning objects"""
    same = cond_labels[None, :] == np.asarray(labels)[:, None]
    num_sum, num_count = multiset_row_sums(_k_smallest(np.where(same, D, np.inf), k))
    if simplified:
        return _simplified(num_sum, num_count)
    den_sum, den_count = multiset_row_sums(_k_smallest(np.where(same, np.inf, D), k))
    return _ratio(num_sum, num_count, den_sum, den_count)


def _score_one(
    conditioning: Dataset, example: Example, k: int, simplified: bool, distance: str = "euclidean"
) -> float:
    x = conditioning.check_object(example.object)
    D = get_distance(distance)(x[None, :], conditioning.X)
    return float(_scores_from_distances(D, conditioning.y, np.array([example.label]), k, simplified)[0])


def score_nn(conditioning: Dataset, example: Example, distance: str = "euclidean") -> float:
    """Nearest same-label distance over nearest different-label distance"""
    return _score_one(conditioning, example, 1, simplified=False, distance=distance)


def score_knn(conditioning: Dataset, example: Example, k: int, distance: str = "euclidean") -> float:
    """Sum of the k smallest same-label distances over the different-label analogue"""
    return _score_one(conditioning, example, k, simplified=False, distance=distance)


def score_simplified_knn(conditioning: Dataset, example: Example, k: int, distance: str = "euclidean") -> float:
    """Sum of the k smallest same-label distances"""
    return _score_one(conditioning, example, k, simplified=True, distance=distance)


# ==================== Optimized state ====================
@dataclass(frozen=True, eq=False)
class KnnState:
    """
    Provisional neighbour bookkeeping of every training example

    Attributes:
        same_rows: (n, k) sorted same-label LOO distances, +inf padded
        same_sum / same_count: exact sum and count of the finite entries
        diff_rows / diff_sum / diff_count: different-label analogues (full k-NN only)
    """
    dataset: Dataset
    k: int
    simplified: bool
    distance: str
    same_rows: np.ndarray
    same_sum: np.ndarray
    same_count: np.ndarray
    diff_rows: Optional[np.ndarray] = None
    diff_sum: Optional[np.ndarray] = None
    diff_count: Optional[np.ndarray] = None

    @property
    def kth_distance(self) -> np.ndarray:
        """Delta_i^k, +inf while fewer than k same-label peers exist"""
        return self.same_rows[:, self.k - 1]

    @property
    def provisional(self) -> np.ndarray:
        """alpha_i' = A((x_i, y_i); Z minus (x_i, y_i))"""
        if self.simplified:
            return _simplified(self.same_sum, self.same_count)
        assert self.diff_sum is not None and self.diff_count is not None
        return _ratio(self.same_sum, self.same_count, self.diff_sum, self.diff_count)

    @cached_property
    def sorted_provisional(self) -> np.ndarray:
        return np.sort(self.provisional)

    def nbytes(self) -> int:
        arrays = [self.same_rows, self.same_sum, self.same_count, self.diff_rows, self.diff_sum, self.diff_count]
        return sum(int(a.nbytes) for a in arrays if a is not None)


def _neighbour_rows(D: np.ndarray, same: np.ndarray, k: int) -> Tuple[np.ndarray, ...]:
    same_rows = _k_smallest(np.where(same, D, np.inf), k)
    diff_rows = _k_smallest(np.where(same, np.inf, D), k)
    return same_rows, diff_rows


def knn_train_optimized(dataset: Dataset, config: ScorerConfig) -> KnnState:
    """
    Precompute the k smallest same-label (and different-label) LOO distances

    Distances are evaluated in row blocks; each row is reduced with a
    linear-time partial selection before sorting its k survivors.
    """
    k = config.effective_k
    simplified = config.measure == MeasureKind.SIMPLIFIED_KNN
    dist: DistanceFn = get_distance(config.distance)
    n = dataset.n
    X, y = dataset.X, dataset.y

    same_rows = np.full((n, k), np.inf)
    diff_rows = np.full((n, k), np.inf)
    block = max(1, _BLOCK_ELEMENTS // max(n, 1))
    for start in range(0, n, block):
        stop = min(n, start + block)
        D = dist(X[start:stop], X)
        D[np.arange(stop - start), np.arange(start, stop)] = np.inf
        same = y[None, :] == y[start:stop, None]
        same_rows[start:stop], diff_rows[start:stop] = _neighbour_rows(D, same, k)

    same_sum, same_count = multiset_row_sums(same_rows)
    logger.debug(f"k-NN state trained: n={n}, k={k}, simplified={simplified}")
    if simplified:
        return KnnState(dataset, k, True, config.distance, same_rows, same_sum, same_count)
    diff_sum, diff_count = multiset_row_sums(diff_rows)
    return KnnState(dataset, k, False, config.distance, same_rows, same_sum, same_count,
                    diff_rows, diff_sum, diff_count)


def _inserted_rows(rows: np.ndarray, idx: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Rows idx with d[j] replacing their k-th entry (caller guarantees d[j] < that entry)"""
    k = rows.shape[1]
    return np.sort(np.concatenate([rows[idx, : k - 1], d[:, None]], axis=1), axis=1)


def _updated_sums(
    rows: np.ndarray, sums: np.ndarray, counts: np.ndarray, idx: np.ndarray, d: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Copies of sums and counts with d[j] inserted into row idx[j]; rows are left alone"""
    sums, counts = sums.copy(), counts.copy()
    if idx.size:
        sums[idx], counts[idx] = multiset_row_sums(_inserted_rows(rows, idx, d))
    return sums, counts


def _insert(
    rows: np.ndarray, sums: np.ndarray, counts: np.ndarray, idx: np.ndarray, d: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Copy of the whole row bookkeeping with d[j] inserted into row idx[j]"""
    block = _inserted_rows(rows, idx, d)
    new_rows, new_sums, new_counts = rows.copy(), sums.copy(), counts.copy()
    new_rows[idx] = block
    new_sums[idx], new_counts[idx] = multiset_row_sums(block)
    return new_rows, new_sums, new_counts


def _entering(rows: np.ndarray, d: np.ndarray, mask: np.ndarray) -> np.ndarray:
    return np.flatnonzero(mask & (d < rows[:, -1]))


def knn_score_vector_optimized(state: KnnState, test_object: np.ndarray, candidate_label: int) -> ScoreVector:
    """
    Full-CP scores for {(x, y_hat)} + Z from the provisional state

    Row i changes only when x enters its k nearest same-label
    (or, for full k-NN, different-label) neighbours.
    """
    dataset = state.dataset
    x = dataset.check_object(test_object)
    d = get_distance(state.distance)(x[None, :], dataset.X)[0]
    return _score_vector_from_distances(state, d, candidate_label)


def _score_vector_from_distances(state: KnnState, d: np.ndarray, candidate_label: int) -> ScoreVector:
    dataset = state.dataset
    same = dataset.y == candidate_label
    idx = _entering(state.same_rows, d, same)
    num_sum, num_count = _updated_sums(state.same_rows, state.same_sum, state.same_count, idx, d[idx])

    if state.simplified:
        training = _simplified(num_sum, num_count)
    else:
        assert state.diff_rows is not None and state.diff_sum is not None and state.diff_count is not None
        idx = _entering(state.diff_rows, d, ~same)
        den_sum, den_count = _updated_sums(state.diff_rows, state.diff_sum, state.diff_count, idx, d[idx])
        training = _ratio(num_sum, num_count, den_sum, den_count)

    test = _scores_from_distances(d[None, :], dataset.y, np.array([candidate_label]), state.k, state.simplified)
    return ScoreVector(training_scores=training, test_score=float(test[0]))


def _changed_scores(state: KnnState, D: np.ndarray, candidate_label: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Training rows whose score moves when (x_j, y_hat) joins Z

    Returns:
        (j, i, alpha): test row, training row and new score of every changed pair
    """
    same = state.dataset.y == candidate_label
    jj, ii = np.nonzero(same[None, :] & (D < state.same_rows[:, -1][None, :]))
    num_sum, num_count = multiset_row_sums(_inserted_rows(state.same_rows, ii, D[jj, ii]))
    if state.simplified:
        return jj, ii, _simplified(num_sum, num_count)

    assert state.diff_rows is not None and state.diff_sum is not None and state.diff_count is not None
    alpha_same = _ratio(num_sum, num_count, state.diff_sum[ii], state.diff_count[ii])
    dj, di = np.nonzero(~same[None, :] & (D < state.diff_rows[:, -1][None, :]))
    den_sum, den_count = multiset_row_sums(_inserted_rows(state.diff_rows, di, D[dj, di]))
    alpha_diff = _ratio(state.same_sum[di], state.same_count[di], den_sum, den_count)
    return np.concatenate([jj, dj]), np.concatenate([ii, di]), np.concatenate([alpha_same, alpha_diff])


def knn_pvalues_optimized(state: KnnState, objects: np.ndarray) -> np.ndarray:
    """
    (m, n_labels) full-CP p-values for a batch of test objects

    Distances are evaluated once per test object and shared by all
    labels. Hits against the unchanged rows come from a binary search
    over the sorted provisional scores; only the pairs (x_j, x_i) where
    x_j enters row i's neighbourhood are rescored.
    """
    dataset = state.dataset
    rows = dataset.check_objects(objects)
    m, n = rows.shape[0], dataset.n
    D = get_distance(state.distance)(rows, dataset.X)
    provisional = state.provisional
    ordered = state.sorted_provisional

    values = np.empty((m, dataset.n_labels))
    for label in range(dataset.n_labels):
        test = _scores_from_distances(D, dataset.y, np.full(m, label), state.k, state.simplified)
        hits = n - np.searchsorted(ordered, test, side="left")
        jj, ii, alpha = _changed_scores(state, D, label)
        t = test[jj]
        hits += np.bincount(jj[alpha >= t], minlength=m) - np.bincount(jj[provisional[ii] >= t], minlength=m)
        values[:, label] = (hits + 1) / (n + 1)
    return values


def knn_observe(state: KnnState, example: Example) -> KnnState:
    """Learn one example: update every affected row and append the new one"""
    dataset = state.dataset
    x = dataset.check_object(example.object)
    label = int(example.label)
    d = get_distance(state.distance)(x[None, :], dataset.X)[0]
    same = dataset.y == label

    same_rows, same_sum, same_count = state.same_rows, state.same_sum, state.same_count
    idx = _entering(same_rows, d, same)
    if idx.size:
        same_rows, same_sum, same_count = _insert(same_rows, same_sum, same_count, idx, d[idx])

    new_same, new_diff = _neighbour_rows(d[None, :], same[None, :], state.k)
    s, c = multiset_row_sums(new_same)
    extended = dataset.with_example(x, label)
    same_rows = np.vstack([same_rows, new_same])
    same_sum = np.append(same_sum, s)
    same_count = np.append(same_count, c)
    if state.simplified:
        return replace(state, dataset=extended, same_rows=same_rows, same_sum=same_sum, same_count=same_count)

    assert state.diff_rows is not None and state.diff_sum is not None and state.diff_count is not None
    diff_rows, diff_sum, diff_count = state.diff_rows, state.diff_sum, state.diff_count
    idx = _entering(diff_rows, d, ~same)
    if idx.size:
        diff_rows, diff_sum, diff_count = _insert(diff_rows, diff_sum, diff_count, idx, d[idx])
    s, c = multiset_row_sums(new_diff)
    return replace(
        state,
        dataset=extended,
        same_rows=same_rows, same_sum=same_sum, same_count=same_count,
        diff_rows=np.vstack([diff_rows, new_diff]),
        diff_sum=np.append(diff_sum, s),
        diff_count=np.append(diff_count, c),
    )


# ==================== Measure and scorer ====================
class KnnMeasure(NonconformityMeasure):
    """NN, k-NN and Simplified k-NN"""

    kinds = (MeasureKind.NN, MeasureKind.KNN, MeasureKind.SIMPLIFIED_KNN)

    @property
    def simplified(self) -> bool:
        return self.config.measure == MeasureKind.SIMPLIFIED_KNN

    def conditional_scores(
        self,
        conditioning: Dataset,
        objects: np.ndarray,
        labels: np.ndarray,
        rng: Optional[np.random.Generator] = None,
    ) -> np.ndarray:
        objects = np.atleast_2d(np.asarray(objects, dtype=np.float64))
        D = get_distance(self.config.distance)(objects, conditioning.X)
        return _scores_from_distances(D, conditioning.y, np.asarray(labels), self.config.effective_k, self.simplified)

    def leave_one_out_scores(
        self, dataset: Dataset, rng_for: Optional[Callable[[int], np.random.Generator]] = None
    ) -> np.ndarray:
        """Row blocks of the pairwise distances with the diagonal excluded"""
        dist = get_distance(self.config.distance)
        n = dataset.n
        X, y = dataset.X, dataset.y
        scores = np.empty(n)
        block = max(1, _BLOCK_ELEMENTS // max(n, 1))
        for start in range(0, n, block):
            stop = min(n, start + block)
            D = dist(X[start:stop], X)
            D[np.arange(stop - start), np.arange(start, stop)] = np.inf
            scores[start:stop] = _scores_from_distances(D, y, y[start:stop], self.config.effective_k, self.simplified)
        return scores

    def train_optimized(self, dataset: Dataset) -> "KnnScorer":
        return KnnScorer(self, knn_train_optimized(dataset, self.config))


class KnnScorer(NonconformityScorer):
    """Optimized k-NN family scorer; supports observe"""

    incremental = True

    def __init__(self, measure: KnnMeasure, state: KnnState) -> None:
        super().__init__(measure, state.dataset)
        self.state = state

    def score_vector(self, test_object: np.ndarray, candidate_label: int) -> ScoreVector:
        return knn_score_vector_optimized(self.state, test_object, candidate_label)

    def pvalues_batch(self, objects: np.ndarray) -> np.ndarray:
        return knn_pvalues_optimized(self.state, objects)

    def observe(self, example: Example) -> "KnnScorer":
        assert isinstance(self.measure, KnnMeasure)
        return KnnScorer(self.measure, knn_observe(self.state, example))

    def memory_bytes(self) -> int:
        return super().memory_bytes() + self.state.nbytes()
