"""
P-values, prediction sets and fuzziness

Pure functions over score vectors and p-value vectors.
"""
import numpy as np

from common.models import PredictionSet, PValueVector, ScoreVector


def compute_pvalue(scores: ScoreVector) -> float:
    """
    Full-CP p-value (|{i : alpha_i >= alpha}| + 1) / (n + 1)

    Ties count as hits; exact float comparison is intended. An empty
    conditioning set gives 1.
    """
    n = scores.n
    hits = int(np.count_nonzero(scores.training_scores >= scores.test_score))
    return (hits + 1) / (n + 1)


def compute_smoothed_pvalue(scores: ScoreVector, tau: float) -> float:
    """
    Smoothed p-value (|{alpha_i > alpha}| + tau * (|{alpha_i = alpha}| + 1)) / (n + 1)

    Args:
        scores: training and test scores
        tau: uniform draw in [0, 1], supplied by the caller's seeded RNG
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must be in [0, 1], got {tau}")
    alphas = scores.training_scores
    greater = int(np.count_nonzero(alphas > scores.test_score))
    equal = int(np.count_nonzero(alphas == scores.test_score))
    return (greater + tau * (equal + 1)) / (scores.n + 1)


def prediction_set(pvalues: PValueVector, epsilon: float) -> PredictionSet:
    """Labels whose p-value is strictly greater than epsilon"""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must be in [0, 1], got {epsilon}")
    labels = frozenset(label for label, p in zip(pvalues.labels, pvalues.values) if p > epsilon)
    return PredictionSet(labels=labels, significance=epsilon)


def fuzziness(pvalues: PValueVector) -> float:
    """Sum of the p-values minus the largest one (subtracted once on ties)"""
    if pvalues.values.size == 0:
        raise ValueError("fuzziness needs a non-empty label alphabet")
    return float(np.sum(pvalues.values) - np.max(pvalues.values))
