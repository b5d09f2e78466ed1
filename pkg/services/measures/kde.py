"""
Kernel density estimation nonconformity measure

A((x, y); S) = -(1 / (n_y h^p)) * sum over same-label x_i in S of K((x - x_i) / h),
with score 0 when S holds no example of label y.
"""
import logging
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from common.models import Dataset, Example, ScoreVector
from common.schemas.scorer import MeasureKind, ScorerConfig
from services.measures.base import NonconformityMeasure, NonconformityScorer
from services.measures.distances import get_distance, get_kernel
from utils.numerics import compensated_sum

logger = logging.getLogger(__name__)

_BLOCK_ELEMENTS = 1 << 22


def _kernel_matrix(objects: np.ndarray, X: np.ndarray, config: ScorerConfig) -> np.ndarray:
    D = get_distance(config.distance)(objects, X)
    return get_kernel(config.kernel)(D / config.h, objects.shape[1])


def _normalized(kernel_sums: np.ndarray, counts: np.ndarray, h: float, p: int) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        scores = -kernel_sums / (counts * h ** p)
    return np.where(counts > 0, scores, 0.0)


def _scores_from_kernel(
    Kmat: np.ndarray, cond_labels: np.ndarray, labels: np.ndarray, h: float, p: int
) -> np.ndarray:
    same = cond_labels[None, :] == np.asarray(labels)[:, None]
    sums = compensated_sum(np.where(same, Kmat, 0.0), axis=1)
    return _normalized(sums, same.sum(axis=1), h, p)


def score_kde(conditioning: Dataset, example: Example, config: ScorerConfig) -> float:
    """Negative normalized same-label kernel sum"""
    x = conditioning.check_object(example.object)
    Kmat = _kernel_matrix(x[None, :], conditioning.X, config)
    return float(_scores_from_kernel(Kmat, conditioning.y, np.array([example.label]), config.h, conditioning.dim)[0])


# ==================== Optimized state ====================
@dataclass(frozen=True, eq=False)
class KdeState:
    """
    Attributes:
        alpha_prime: (n,) same-label LOO kernel sums
        counts: examples per label id
    """
    dataset: Dataset
    config: ScorerConfig
    alpha_prime: np.ndarray
    counts: np.ndarray

    def nbytes(self) -> int:
        return int(self.alpha_prime.nbytes + self.counts.nbytes)


def kde_train_optimized(dataset: Dataset, config: ScorerConfig) -> KdeState:
    n = dataset.n
    X, y = dataset.X, dataset.y
    alpha_prime = np.zeros(n)
    block = max(1, _BLOCK_ELEMENTS // max(n, 1))
    for start in range(0, n, block):
        stop = min(n, start + block)
        Kmat = _kernel_matrix(X[start:stop], X, config)
        same = y[None, :] == y[start:stop, None]
        same[np.arange(stop - start), np.arange(start, stop)] = False
        alpha_prime[start:stop] = compensated_sum(np.where(same, Kmat, 0.0), axis=1)
    logger.debug(f"KDE state trained: n={n}, h={config.h}")
    return KdeState(dataset=dataset, config=config, alpha_prime=alpha_prime, counts=dataset.label_counts())


def kde_score_vector_optimized(state: KdeState, test_object: np.ndarray, candidate_label: int) -> ScoreVector:
    """
    Full-CP scores from the preliminary kernel sums

    For y_i = y_hat the test kernel term joins the sum and the
    normalizer stays c_{y_i}; otherwise the normalizer drops to
    c_{y_i} - 1 and the sum is untouched.
    """
    dataset, config = state.dataset, state.config
    x = dataset.check_object(test_object)
    kx = _kernel_matrix(x[None, :], dataset.X, config)[0]
    same = dataset.y == candidate_label
    own_counts = state.counts[dataset.y]
    sums = np.where(same, state.alpha_prime + kx, state.alpha_prime)
    counts = np.where(same, own_counts, own_counts - 1)
    training = _normalized(sums, counts, config.h, dataset.dim)
    test = _scores_from_kernel(kx[None, :], dataset.y, np.array([candidate_label]), config.h, dataset.dim)
    return ScoreVector(training_scores=training, test_score=float(test[0]))


def kde_pvalues_optimized(state: KdeState, objects: np.ndarray) -> np.ndarray:
    """
    (m, n_labels) full-CP p-values for a batch of test objects

    The kernel matrix between the batch and Z is evaluated once; every
    label then rescales the preliminary sums as kde_score_vector_optimized
    does, one row per test object.
    """
    dataset, config = state.dataset, state.config
    rows = dataset.check_objects(objects)
    m = rows.shape[0]
    Kmat = _kernel_matrix(rows, dataset.X, config)
    own_counts = state.counts[dataset.y]

    values = np.empty((m, dataset.n_labels))
    for label in range(dataset.n_labels):
        same = dataset.y == label
        sums = np.where(same[None, :], state.alpha_prime[None, :] + Kmat, state.alpha_prime[None, :])
        training = _normalized(sums, np.where(same, own_counts, own_counts - 1), config.h, dataset.dim)
        test = _scores_from_kernel(Kmat, dataset.y, np.full(m, label), config.h, dataset.dim)
        hits = np.count_nonzero(training >= test[:, None], axis=1)
        values[:, label] = (hits + 1) / (dataset.n + 1)
    return values


def kde_observe(state: KdeState, example: Example) -> KdeState:
    dataset = state.dataset
    x = dataset.check_object(example.object)
    label = int(example.label)
    kx = _kernel_matrix(x[None, :], dataset.X, state.config)[0]
    same = dataset.y == label
    alpha_prime = np.where(same, state.alpha_prime + kx, state.alpha_prime)
    own = compensated_sum(np.where(same, kx, 0.0)[None, :], axis=1)
    counts = state.counts.copy()
    counts[label] += 1
    return replace(
        state,
        dataset=dataset.with_example(x, label),
        alpha_prime=np.append(alpha_prime, own),
        counts=counts,
    )


# ==================== Measure and scorer ====================
class KdeMeasure(NonconformityMeasure):
    kinds = (MeasureKind.KDE,)

    def conditional_scores(
        self,
        conditioning: Dataset,
        objects: np.ndarray,
        labels: np.ndarray,
        rng: Optional[np.random.Generator] = None,
    ) -> np.ndarray:
        objects = np.atleast_2d(np.asarray(objects, dtype=np.float64))
        Kmat = _kernel_matrix(objects, conditioning.X, self.config)
        return _scores_from_kernel(Kmat, conditioning.y, np.asarray(labels), self.config.h, objects.shape[1])

    def leave_one_out_scores(
        self, dataset: Dataset, rng_for: Optional[Callable[[int], np.random.Generator]] = None
    ) -> np.ndarray:
        """Row blocks of the kernel matrix with the diagonal excluded"""
        n = dataset.n
        X, y = dataset.X, dataset.y
        scores = np.empty(n)
        block = max(1, _BLOCK_ELEMENTS // max(n, 1))
        for start in range(0, n, block):
            stop = min(n, start + block)
            Kmat = _kernel_matrix(X[start:stop], X, self.config)
            same = y[None, :] == y[start:stop, None]
            same[np.arange(stop - start), np.arange(start, stop)] = False
            sums = compensated_sum(np.where(same, Kmat, 0.0), axis=1)
            scores[start:stop] = _normalized(sums, same.sum(axis=1), self.config.h, dataset.dim)
        return scores

    def train_optimized(self, dataset: Dataset) -> "KdeScorer":
        return KdeScorer(self, kde_train_optimized(dataset, self.config))


class KdeScorer(NonconformityScorer):
    """Optimized KDE scorer; supports observe"""

    incremental = True

    def __init__(self, measure: KdeMeasure, state: KdeState) -> None:
        super().__init__(measure, state.dataset)
        self.state = state

    def score_vector(self, test_object: np.ndarray, candidate_label: int) -> ScoreVector:
        return kde_score_vector_optimized(self.state, test_object, candidate_label)

    def pvalues_batch(self, objects: np.ndarray) -> np.ndarray:
        return kde_pvalues_optimized(self.state, objects)

    def observe(self, example: Example) -> "KdeScorer":
        assert isinstance(self.measure, KdeMeasure)
        return KdeScorer(self.measure, kde_observe(self.state, example))

    def memory_bytes(self) -> int:
        return super().memory_bytes() + self.state.nbytes()
