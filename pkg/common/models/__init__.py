"""
Domain models package

Numeric dataclasses shared by every service
"""
from common.models.dataset import Dataset, Example, TaskKind, sort_label_tokens
from common.models.intervals import Interval, IntervalSet
from common.models.pvalues import PredictionSet, PValueVector, ScoreVector

__all__ = [
    "Dataset",
    "Example",
    "TaskKind",
    "sort_label_tokens",
    "Interval",
    "IntervalSet",
    "PredictionSet",
    "PValueVector",
    "ScoreVector",
]
