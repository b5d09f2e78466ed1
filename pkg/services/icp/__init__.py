"""
Inductive conformal prediction

Positional split: the first t examples train the measure, the
remaining n - t are calibration examples.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from common.exceptions.conformal import InvalidSplitError
from common.models import Dataset, PValueVector
from common.schemas.scorer import ScorerConfig
from services.measures import get_measure
from services.measures.base import ConditionalScores

logger = logging.getLogger(__name__)


def split_size(n: int, train_fraction: float) -> int:
    """Proper-training size for a fraction, clamped to 1..n-1"""
    return min(max(1, int(round(n * train_fraction))), n - 1)


@dataclass(frozen=True, eq=False)
class IcpCalibration:
    """
    Attributes:
        config: measure and hyperparameters
        proper: proper training set (first t examples)
        scores: the measure bound to the proper training set
        calibration_scores: alpha_{t+1}..alpha_n
    """
    config: ScorerConfig
    proper: Dataset
    scores: ConditionalScores
    calibration_scores: np.ndarray
    t: int
    n: int

    def memory_bytes(self) -> int:
        return int(self.proper.X.nbytes + self.proper.y.nbytes + self.calibration_scores.nbytes)


def icp_calibrate(dataset: Dataset, t: Optional[int], config: ScorerConfig) -> IcpCalibration:
    """
    Train on the first t examples and score the rest

    Args:
        dataset: examples in split order (shuffling is the caller's job)
        t: proper-training size; n // 2 when omitted
        config: measure and hyperparameters

    Raises:
        InvalidSplitError: unless 1 <= t <= n - 1
    """
    n = dataset.n
    if t is None:
        t = n // 2
    if not 1 <= t <= n - 1:
        raise InvalidSplitError(t=t, n=n)
    proper = dataset.head(t)
    calibration = dataset.tail(t)
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, t, n]))
    scores = get_measure(config).fit_conditional(proper, rng=rng)
    logger.debug(f"ICP calibrated: measure={config.measure.value}, t={t}, n={n}")
    return IcpCalibration(
        config=config,
        proper=proper,
        scores=scores,
        calibration_scores=scores(calibration.X, calibration.y),
        t=t,
        n=n,
    )


def calibration_pvalues(calibration_scores: np.ndarray, test_scores: np.ndarray) -> np.ndarray:
    """(|{calibration scores >= alpha}| + 1) / (number of calibration scores + 1), per test score"""
    cal = np.sort(np.asarray(calibration_scores, dtype=np.float64))
    hits = cal.shape[0] - np.searchsorted(cal, np.asarray(test_scores, dtype=np.float64), side="left")
    return (hits + 1) / (cal.shape[0] + 1)


def icp_pvalue(calib: IcpCalibration, test_object: np.ndarray, candidate_label: int) -> float:
    """(|{i > t : alpha_i >= alpha}| + 1) / (n - t + 1)"""
    x = calib.proper.check_object(test_object)
    alpha = calib.scores(x[None, :], np.array([candidate_label]))
    return float(calibration_pvalues(calib.calibration_scores, alpha)[0])


def icp_classify(calib: IcpCalibration, test_object: np.ndarray) -> PValueVector:
    """ICP p-value of every candidate label"""
    x = calib.proper.check_object(test_object)
    n_labels = calib.proper.n_labels
    alphas = calib.scores(np.repeat(x[None, :], n_labels, axis=0), np.arange(n_labels))
    return PValueVector(labels=calib.proper.label_alphabet, values=calibration_pvalues(calib.calibration_scores, alphas))


__all__ = ["IcpCalibration", "icp_calibrate", "icp_pvalue", "icp_classify", "calibration_pvalues", "split_size"]
