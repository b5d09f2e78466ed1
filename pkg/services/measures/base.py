"""
Nonconformity measure and scorer contracts

A measure scores examples against an arbitrary conditioning set. A
scorer is a measure bound to a training set; it produces the full-CP
score vector for the augmented set {(x, y_hat)} + Z, either by literal
recomputation (StandardScorer) or from precomputed state (the optimized
scorers in the sibling modules).
"""
import logging
from abc import ABC, abstractmethod
from typing import Callable, ClassVar, Optional, Sequence

import numpy as np

from common.exceptions.conformal import NotIncrementalError, UnsupportedLabelsError
from common.models import Dataset, Example, ScoreVector
from common.schemas.scorer import MeasureKind, ScorerConfig, Variant
from services.conformal.pvalues import compute_pvalue

logger = logging.getLogger(__name__)

# (objects, label ids) -> scores against a fixed conditioning set
ConditionalScores = Callable[[np.ndarray, np.ndarray], np.ndarray]


class NonconformityMeasure(ABC):
    """
    A((x, y); S) for one measure kind and its hyperparameters

    Subclasses implement ``conditional_scores`` (vectorized over the
    scored examples) and ``train_optimized``.
    """

    kinds: ClassVar[Sequence[MeasureKind]] = ()

    def __init__(self, config: ScorerConfig) -> None:
        if config.measure not in self.kinds:
            raise ValueError(f"{type(self).__name__} does not implement {config.measure.value}")
        self.config = config

    @property
    def kind(self) -> MeasureKind:
        return self.config.measure

    @abstractmethod
    def conditional_scores(
        self,
        conditioning: Dataset,
        objects: np.ndarray,
        labels: np.ndarray,
        rng: Optional[np.random.Generator] = None,
    ) -> np.ndarray:
        """
        Score every (objects[j], labels[j]) against the same conditioning set

        Args:
            conditioning: the set S
            objects: (m, p) objects to score
            labels: (m,) label ids
            rng: randomness for measures that need it (bootstrap)

        Returns:
            (m,) nonconformity scores
        """

    def fit_conditional(self, conditioning: Dataset, rng: Optional[np.random.Generator] = None) -> ConditionalScores:
        """
        Bind the measure to one conditioning set

        Measures that learn a model (LS-SVM, bootstrap) train it once
        here so that repeated scoring reuses it.
        """
        def scores(objects: np.ndarray, labels: np.ndarray) -> np.ndarray:
            return self.conditional_scores(conditioning, objects, labels, rng=rng)
        return scores

    def score(self, conditioning: Dataset, example: Example, rng: Optional[np.random.Generator] = None) -> float:
        """A((x, y); S) for a single example"""
        obj = conditioning.check_object(example.object)
        return float(self.conditional_scores(conditioning, obj[None, :], np.array([example.label]), rng=rng)[0])

    def leave_one_out_scores(
        self, dataset: Dataset, rng_for: Optional[Callable[[int], np.random.Generator]] = None
    ) -> np.ndarray:
        """
        A((x_i, y_i); dataset minus example i) for every example

        The default scores each example against its own leave-one-out
        copy of the dataset. Measures with a pairwise form override it
        with a blocked pass over the pairwise matrix.

        Args:
            dataset: the examples
            rng_for: randomness for example i (bootstrap)

        Returns:
            (n,) scores
        """
        scores = np.empty(dataset.n)
        for i in range(dataset.n):
            rng = rng_for(i) if rng_for is not None else None
            scores[i] = self.score(dataset.without(i), dataset.example(i), rng=rng)
        return scores

    @abstractmethod
    def train_optimized(self, dataset: Dataset) -> "NonconformityScorer":
        """Precompute the state of the optimized scorer"""

    def standard(self, dataset: Dataset) -> "StandardScorer":
        return StandardScorer(self, dataset)


class NonconformityScorer(ABC):
    """
    Trained scorer: a measure bound to a training set Z

    Scorers are immutable while predicting; ``observe`` returns a new
    scorer and leaves this one untouched.
    """

    variant: ClassVar[Variant] = Variant.OPTIMIZED
    incremental: ClassVar[bool] = False

    def __init__(self, measure: NonconformityMeasure, dataset: Dataset) -> None:
        if dataset.task != "classification":
            raise UnsupportedLabelsError("full-CP classification scorers need a classification dataset")
        self.measure = measure
        self.dataset = dataset

    @property
    def config(self) -> ScorerConfig:
        return self.measure.config

    @property
    def n(self) -> int:
        return self.dataset.n

    @abstractmethod
    def score_vector(self, test_object: np.ndarray, candidate_label: int) -> ScoreVector:
        """Scores of the augmented set {(x, y_hat)} + Z with leave-one-out training scores"""

    def pvalue(self, test_object: np.ndarray, candidate_label: int) -> float:
        return compute_pvalue(self.score_vector(test_object, candidate_label))

    def pvalues_batch(self, objects: np.ndarray) -> np.ndarray:
        """
        P-values of every candidate label for a batch of test objects

        Scorers that can share work between labels and test objects
        override this; the results equal one pvalue call per pair.

        Returns:
            (m, n_labels) p-values
        """
        rows = self.dataset.check_objects(objects)
        values = np.empty((rows.shape[0], self.dataset.n_labels))
        for j, x in enumerate(rows):
            for label in range(self.dataset.n_labels):
                values[j, label] = self.pvalue(x, label)
        return values

    def observe(self, example: Example) -> "NonconformityScorer":
        """Learn one more example; only incremental scorers support this"""
        raise NotIncrementalError(scorer=f"{self.config.measure.value}/{self.variant.value}")

    def memory_bytes(self) -> int:
        """Bytes held by the scorer beyond the Python object overhead"""
        return int(self.dataset.X.nbytes + self.dataset.y.nbytes)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(measure={self.config.measure.value}, n={self.n})"


class StandardScorer(NonconformityScorer):
    """
    Literal full CP: every training score is recomputed from scratch

    alpha_i = A((x_i, y_i); {(x, y_hat)} + Z minus (x_i, y_i)) and
    alpha = A((x, y_hat); Z), i.e. the leave-one-out scores of the
    augmented set with the test example last. Holds only the training set.
    """

    variant = Variant.STANDARD

    def _rng(self, index: int, candidate_label: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([self.config.seed, index, candidate_label]))

    def score_vector(self, test_object: np.ndarray, candidate_label: int) -> ScoreVector:
        x = self.dataset.check_object(test_object)
        augmented = self.dataset.with_example(x, candidate_label)
        scores = self.measure.leave_one_out_scores(augmented, rng_for=lambda i: self._rng(i, candidate_label))
        return ScoreVector(training_scores=scores[: self.n], test_score=float(scores[self.n]))
