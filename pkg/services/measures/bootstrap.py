"""
Bootstrap ensemble nonconformity measure

A((x, y); S) = -(1/B) * sum over b of f_b^y(x), where f_b is a decision
tree grown on the b-th bootstrap sample of S.

The optimized scorer draws size-(n+1) samples from Z* = Z + {*}, where
the placeholder * (index n) stands for the unknown test example. Trees
on samples without * are grown once at training time; samples with *
are regrown per (x, y_hat) after substituting the test example.
"""
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from common.exceptions.conformal import BootstrapSamplingError, NotIncrementalError
from common.models import Dataset, Example, ScoreVector
from common.schemas.scorer import MeasureKind, ScorerConfig
from services.conformal.pvalues import compute_pvalue
from services.measures.base import ConditionalScores, NonconformityMeasure, NonconformityScorer
from services.measures.tree import DecisionTree, fit_tree

logger = logging.getLogger(__name__)


def max_draws(B: int) -> int:
    """Guard on the number of bootstrap samples drawn during training"""
    return int(math.ceil(1000 * B * math.e))


def _tree_rng(seed: int, sample_id: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, sample_id]))


# ==================== Sampling ====================
@dataclass(frozen=True, eq=False)
class BootstrapDraws:
    """
    Result of the sampling loop

    Attributes:
        samples: every drawn index multiset into Z*, in draw order
        members: (n, B) sample ids of E_i, first B in draw order
        ensemble: sample ids of E (no placeholder), first B in draw order
    """
    samples: List[np.ndarray]
    members: np.ndarray
    ensemble: np.ndarray

    @property
    def draws(self) -> int:
        return len(self.samples)


def draw_bootstrap_samples(n: int, B: int, rng: np.random.Generator) -> BootstrapDraws:
    """
    Draw samples of size n+1 from Z* until |E| >= B and |E_i| >= B for all i

    Raises:
        BootstrapSamplingError: if the draw guard is exceeded
    """
    star = n
    limit = max_draws(B)
    samples: List[np.ndarray] = []
    members = np.full((n, B), -1, dtype=np.int64)
    filled = np.zeros(n, dtype=np.int64)
    ensemble: List[int] = []
    while len(ensemble) < B or (n and filled.min() < B):
        if len(samples) >= limit:
            raise BootstrapSamplingError(draws=len(samples))
        b = len(samples)
        sample = rng.integers(0, n + 1, size=n + 1)
        samples.append(sample)
        counts = np.bincount(sample, minlength=n + 1)
        rows = np.flatnonzero((counts[:n] == 0) & (filled < B))
        members[rows, filled[rows]] = b
        filled[rows] += 1
        if counts[star] == 0 and len(ensemble) < B:
            ensemble.append(b)
    return BootstrapDraws(samples=samples, members=members, ensemble=np.asarray(ensemble, dtype=np.int64))


def bprime_study(n_grid: Sequence[int], B: int, seeds: Sequence[int]) -> Dict[int, float]:
    """Mean number of draws B' needed per training size"""
    result: Dict[int, float] = {}
    for n in n_grid:
        draws = [draw_bootstrap_samples(n, B, np.random.default_rng(np.random.SeedSequence([s]))).draws for s in seeds]
        result[int(n)] = float(np.mean(draws))
        logger.debug(f"B' study: n={n}, B={B}, mean draws={result[int(n)]:.1f}")
    return result


# ==================== Optimized state ====================
@dataclass(frozen=True, eq=False)
class StarSample:
    """A sample holding the placeholder and the (row, slot) entries of E_i it fills"""
    sample: np.ndarray
    rows: np.ndarray
    slots: np.ndarray


@dataclass(frozen=True, eq=False)
class BootstrapState:
    """
    Attributes:
        members: (n, B) sample ids of E_i
        stored: (n, B) pretrained own-label confidences, NaN where the sample holds *
        star_samples: samples holding *, by sample id, with the (row, slot) pairs they fill
        ensemble: B pretrained trees of E
        draws: B', samples drawn before both conditions held
        trees_trained: distinct trees grown at training time
    """
    dataset: Dataset
    config: ScorerConfig
    members: np.ndarray
    stored: np.ndarray
    star_samples: Dict[int, StarSample]
    ensemble: Tuple[DecisionTree, ...]
    draws: int
    trees_trained: int

    def nbytes(self) -> int:
        total = self.members.nbytes + self.stored.nbytes
        total += sum(s.sample.nbytes + s.rows.nbytes + s.slots.nbytes for s in self.star_samples.values())
        total += sum(t.nbytes() for t in self.ensemble)
        return int(total)


def _grow(X: np.ndarray, y: np.ndarray, sample: np.ndarray, dataset: Dataset, config: ScorerConfig,
          sample_id: int) -> DecisionTree:
    return fit_tree(
        X[sample],
        y[sample],
        dataset.n_labels,
        config.tree_max_depth,
        config.features_per_split(dataset.dim),
        _tree_rng(config.seed, sample_id),
    )


def bootstrap_train(dataset: Dataset, config: ScorerConfig) -> BootstrapState:
    """Sample, truncate to B, and pretrain every tree that does not need the test example"""
    n, B = dataset.n, config.B
    draws = draw_bootstrap_samples(n, B, np.random.default_rng(np.random.SeedSequence([config.seed])))
    trees: Dict[int, DecisionTree] = {}
    stored = np.full((n, B), np.nan)
    star_samples: Dict[int, StarSample] = {}

    for b in np.unique(draws.members):
        sample = draws.samples[b]
        rows, slots = np.nonzero(draws.members == b)
        if np.any(sample == n):
            star_samples[int(b)] = StarSample(sample=sample, rows=rows, slots=slots)
            continue
        tree = _grow(dataset.X, dataset.y, sample, dataset, config, int(b))
        trees[int(b)] = tree
        stored[rows, slots] = tree.predict_proba(dataset.X[rows])[np.arange(rows.shape[0]), dataset.y[rows]]

    ensemble = []
    for b in draws.ensemble:
        if int(b) not in trees:
            trees[int(b)] = _grow(dataset.X, dataset.y, draws.samples[b], dataset, config, int(b))
        ensemble.append(trees[int(b)])

    logger.debug(f"Bootstrap state trained: n={n}, B={B}, draws={draws.draws}, trees={len(trees)}")
    return BootstrapState(
        dataset=dataset,
        config=config,
        members=draws.members,
        stored=stored,
        star_samples=star_samples,
        ensemble=tuple(ensemble),
        draws=draws.draws,
        trees_trained=len(trees),
    )


def bootstrap_score_vector(state: BootstrapState, test_object: np.ndarray, candidate_label: int) -> ScoreVector:
    """
    alpha_i = -(1/B) sum over E_i of f^{y_i}(x_i); alpha = -(1/B) sum over E of g^{y_hat}(x)

    Samples holding * are regrown with (x, y_hat) in place of * in a
    local copy; the stored predictions are only read.
    """
    dataset, config = state.dataset, state.config
    x = dataset.check_object(test_object)
    X_aug = np.vstack([dataset.X, x[None, :]])
    y_aug = np.append(dataset.y, candidate_label)
    confidences = state.stored.copy()
    for b, star in state.star_samples.items():
        rows, slots = star.rows, star.slots
        tree = _grow(X_aug, y_aug, star.sample, dataset, config, b)
        confidences[rows, slots] = tree.predict_proba(dataset.X[rows])[np.arange(rows.shape[0]), dataset.y[rows]]

    B = config.B
    training = -confidences.sum(axis=1) / B
    test = -sum(float(tree.predict_proba(x[None, :])[0, candidate_label]) for tree in state.ensemble) / B
    return ScoreVector(training_scores=training, test_score=test)


def bootstrap_pvalue(state: BootstrapState, test_object: np.ndarray, candidate_label: int) -> float:
    return compute_pvalue(bootstrap_score_vector(state, test_object, candidate_label))


# ==================== Measure and scorer ====================
class BootstrapMeasure(NonconformityMeasure):
    kinds = (MeasureKind.BOOTSTRAP,)

    def fit_conditional(self, conditioning: Dataset, rng: Optional[np.random.Generator] = None) -> ConditionalScores:
        """Grow B trees on fresh bootstrap samples of the conditioning set"""
        m = conditioning.n
        rng = rng if rng is not None else np.random.default_rng(self.config.seed)
        trees: List[DecisionTree] = []
        for _ in range(self.config.B if m else 0):
            sample = rng.integers(0, m, size=m)
            trees.append(fit_tree(
                conditioning.X[sample],
                conditioning.y[sample],
                conditioning.n_labels,
                self.config.tree_max_depth,
                self.config.features_per_split(conditioning.dim),
                rng,
            ))

        def scores(objects: np.ndarray, labels: np.ndarray) -> np.ndarray:
            objects = np.atleast_2d(np.asarray(objects, dtype=np.float64))
            rows = np.arange(objects.shape[0])
            labels = np.asarray(labels, dtype=np.int64)
            total = np.zeros(objects.shape[0])
            for tree in trees:
                total += tree.predict_proba(objects)[rows, labels]
            # an empty conditioning set scores 0
            return -total / self.config.B
        return scores

    def conditional_scores(
        self,
        conditioning: Dataset,
        objects: np.ndarray,
        labels: np.ndarray,
        rng: Optional[np.random.Generator] = None,
    ) -> np.ndarray:
        return self.fit_conditional(conditioning, rng)(objects, labels)

    def train_optimized(self, dataset: Dataset) -> "BootstrapScorer":
        return BootstrapScorer(self, bootstrap_train(dataset, self.config))


class BootstrapScorer(NonconformityScorer):
    """Optimized bootstrap scorer; not incremental"""

    def __init__(self, measure: BootstrapMeasure, state: BootstrapState) -> None:
        super().__init__(measure, state.dataset)
        self.state = state

    @property
    def draws(self) -> int:
        return self.state.draws

    def score_vector(self, test_object: np.ndarray, candidate_label: int) -> ScoreVector:
        return bootstrap_score_vector(self.state, test_object, candidate_label)

    def observe(self, example: Example) -> NonconformityScorer:
        raise NotIncrementalError("Bootstrap scorer relearns every sample on a new example", scorer="bootstrap")

    def memory_bytes(self) -> int:
        return super().memory_bytes() + self.state.nbytes()
