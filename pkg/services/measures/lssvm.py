"""
Least-squares SVM nonconformity measure

Binary labels only: alphabet position 0 maps to -1 and position 1 to
+1. The model is kept in primal form with an explicit feature map so
that examples can be added and removed with rank-one updates of the
weights w and the auxiliary matrix C = (Phi^T Phi + rho I)^-1 Phi^T Phi.

A((x, y); S) = -y * w_S^T phi(x)
"""
import logging
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
from scipy import linalg

from common.exceptions.conformal import DegenerateUpdateError, UnsupportedLabelsError
from common.models import Dataset, Example, ScoreVector
from common.schemas.scorer import MeasureKind, ScorerConfig
from services.measures.base import ConditionalScores, NonconformityMeasure, NonconformityScorer
from services.measures.distances import FeatureMap, get_feature_map

logger = logging.getLogger(__name__)

DEGENERATE_TOLERANCE = 1e-12

TrainForm = Literal["auto", "primal", "dual"]


@dataclass(frozen=True, eq=False)
class LssvmModel:
    """
    Attributes:
        w: (q,) weights in feature space
        C: (q, q) auxiliary matrix of the update rules
        rho: regularizer
        feature_map: explicit map phi with output dimension q
        n_examples: size of the training multiset
    """
    w: np.ndarray
    C: np.ndarray
    rho: float
    feature_map: FeatureMap
    n_examples: int

    @property
    def q(self) -> int:
        return int(self.w.shape[0])

    def decision(self, Phi: np.ndarray) -> np.ndarray:
        return np.atleast_2d(Phi) @ self.w

    def nbytes(self) -> int:
        return int(self.w.nbytes + self.C.nbytes)


def signed_labels(dataset: Dataset) -> np.ndarray:
    """Label ids {0, 1} as targets {-1, +1}"""
    if dataset.n_labels != 2:
        raise UnsupportedLabelsError(
            f"LS-SVM needs exactly 2 labels, got {dataset.n_labels}: {list(dataset.label_alphabet)}"
        )
    return 2.0 * dataset.y.astype(np.float64) - 1.0


def signed_label(label_id: int) -> float:
    return 2.0 * float(label_id) - 1.0


def lssvm_fit(
    Phi: np.ndarray, Y: np.ndarray, rho: float, feature_map: FeatureMap, form: TrainForm = "auto"
) -> LssvmModel:
    """
    Closed-form training on mapped objects

    The primal form solves the q x q system; the dual form solves the
    n x n system and maps back with Phi^T. Both agree by the
    push-through identity; "auto" picks the smaller system.
    """
    n, q = Phi.shape
    if n == 0:
        return LssvmModel(np.zeros(q), np.zeros((q, q)), rho, feature_map, 0)
    if form == "auto":
        form = "primal" if q <= n else "dual"
    if form == "primal":
        A = Phi.T @ Phi + rho * np.eye(q)
        rhs = np.column_stack([Phi.T @ Y, Phi.T @ Phi])
        sol = linalg.solve(A, rhs, assume_a="pos")
        w, C = sol[:, 0], sol[:, 1:]
    else:
        G = Phi @ Phi.T + rho * np.eye(n)
        sol = linalg.solve(G, np.column_stack([Y, Phi]), assume_a="pos")
        w, C = Phi.T @ sol[:, 0], Phi.T @ sol[:, 1:]
    C = 0.5 * (C + C.T)
    return LssvmModel(w=w, C=C, rho=rho, feature_map=feature_map, n_examples=n)


def lssvm_train(dataset: Dataset, config: ScorerConfig, form: TrainForm = "auto") -> LssvmModel:
    """
    Batch training w = Phi^T (Phi Phi^T + rho I_n)^-1 Y

    Raises:
        UnsupportedLabelsError: if the alphabet does not hold exactly 2 labels
        FeatureMapError: if objects do not match the feature map
    """
    feature_map = get_feature_map(config.feature_map, dataset.dim, config.poly_degree)
    Y = signed_labels(dataset)
    Phi = feature_map(dataset.X) if dataset.n else np.zeros((0, feature_map.output_dim))
    return lssvm_fit(Phi, Y, config.rho, feature_map, form=form)


def _rank_one(model: LssvmModel, phi: np.ndarray, y: float, sign: int, index: Optional[int] = None) -> LssvmModel:
    v = model.C @ phi - phi
    quad = float(phi @ model.C @ phi)
    norm = float(phi @ phi)
    den = sign * norm + model.rho - sign * quad
    if abs(den) <= DEGENERATE_TOLERANCE:
        raise DegenerateUpdateError(index=index)
    residual = float(phi @ model.w) - y
    w = model.w + sign * v * residual / den
    C = model.C + sign * np.outer(v, v) / den
    return LssvmModel(w=w, C=C, rho=model.rho, feature_map=model.feature_map, n_examples=model.n_examples + sign)


def lssvm_increment(model: LssvmModel, example: Example) -> LssvmModel:
    """
    Add one example; example.label is the signed target (-1 or +1)

    Returns a new model, the input is left untouched.

    Raises:
        DegenerateUpdateError: if |phi^T phi + rho - phi^T C phi| <= 1e-12
    """
    phi = model.feature_map(example.object)[0]
    return _rank_one(model, phi, float(example.label), +1)


def lssvm_decrement(model: LssvmModel, example: Example) -> LssvmModel:
    """
    Remove one example of the training multiset; example.label is the signed target

    Raises:
        DegenerateUpdateError: if |-phi^T phi + rho + phi^T C phi| <= 1e-12
    """
    phi = model.feature_map(example.object)[0]
    return _rank_one(model, phi, float(example.label), -1)


def lssvm_score_vector_optimized(
    model: LssvmModel, dataset: Dataset, test_object: np.ndarray, candidate_label: int
) -> ScoreVector:
    """
    Full-CP scores via one increment and n decrements

    M+ = increment(M, (x, y_hat)); alpha_i is the score of (x_i, y_i)
    under M+ with (x_i, y_i) decremented. Only phi_i^T w_{-i} is needed,
    so every decrement is evaluated in closed form against M+ without
    materializing the per-i model.
    """
    x = dataset.check_object(test_object)
    y_hat = signed_label(candidate_label)
    phi_x = model.feature_map(x)[0]
    plus = _rank_one(model, phi_x, y_hat, +1, index=dataset.n)

    Y = signed_labels(dataset)
    Phi = model.feature_map(dataset.X) if dataset.n else np.zeros((0, model.q))
    fw = Phi @ plus.w
    quad = np.einsum("ij,ij->i", Phi @ plus.C, Phi)
    norm = np.einsum("ij,ij->i", Phi, Phi)
    den = -norm + plus.rho + quad
    bad = np.flatnonzero(np.abs(den) <= DEGENERATE_TOLERANCE)
    if bad.size:
        raise DegenerateUpdateError(index=int(bad[0]))
    f_loo = fw - (quad - norm) * (fw - Y) / den
    training = -Y * f_loo
    test = -y_hat * float(phi_x @ model.w)
    return ScoreVector(training_scores=training, test_score=test)


# ==================== Measure and scorer ====================
class LssvmMeasure(NonconformityMeasure):
    kinds = (MeasureKind.LSSVM,)

    def fit_conditional(self, conditioning: Dataset, rng: Optional[np.random.Generator] = None) -> ConditionalScores:
        model = lssvm_train(conditioning, self.config)

        def scores(objects: np.ndarray, labels: np.ndarray) -> np.ndarray:
            Phi = model.feature_map(np.atleast_2d(objects))
            signs = 2.0 * np.asarray(labels, dtype=np.float64) - 1.0
            return -signs * model.decision(Phi)
        return scores

    def conditional_scores(
        self,
        conditioning: Dataset,
        objects: np.ndarray,
        labels: np.ndarray,
        rng: Optional[np.random.Generator] = None,
    ) -> np.ndarray:
        return self.fit_conditional(conditioning, rng)(objects, labels)

    def train_optimized(self, dataset: Dataset) -> "LssvmScorer":
        return LssvmScorer(self, dataset, lssvm_train(dataset, self.config))


class LssvmScorer(NonconformityScorer):
    """Optimized LS-SVM scorer holding the model trained on Z; supports observe"""

    incremental = True

    def __init__(self, measure: LssvmMeasure, dataset: Dataset, model: LssvmModel) -> None:
        super().__init__(measure, dataset)
        signed_labels(dataset)
        self.model = model

    def score_vector(self, test_object: np.ndarray, candidate_label: int) -> ScoreVector:
        return lssvm_score_vector_optimized(self.model, self.dataset, test_object, candidate_label)

    def observe(self, example: Example) -> "LssvmScorer":
        assert isinstance(self.measure, LssvmMeasure)
        x = self.dataset.check_object(example.object)
        label = int(example.label)
        model = lssvm_increment(self.model, Example(object=x, label=signed_label(label)))
        return LssvmScorer(self.measure, self.dataset.with_example(x, label), model)

    def memory_bytes(self) -> int:
        return super().memory_bytes() + self.model.nbytes()
