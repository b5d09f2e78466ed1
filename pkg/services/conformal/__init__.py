"""
Conformal prediction core

P-values, prediction sets, fuzziness, full-CP classification and the
online stream.
"""
from services.conformal.engine import classify, classify_batch, observe
from services.conformal.online import OnlinePredictor, OnlineStep
from services.conformal.pvalues import compute_pvalue, compute_smoothed_pvalue, fuzziness, prediction_set

__all__ = [
    "compute_pvalue",
    "compute_smoothed_pvalue",
    "prediction_set",
    "fuzziness",
    "classify",
    "classify_batch",
    "observe",
    "OnlinePredictor",
    "OnlineStep",
]
