"""
Score, p-value and prediction-set models
"""
from dataclasses import dataclass
from typing import Dict, FrozenSet, Tuple

import numpy as np


@dataclass(frozen=True, eq=False)
class ScoreVector:
    """Leave-one-out training scores alpha_1..alpha_n and the test score alpha"""
    training_scores: np.ndarray
    test_score: float

    @property
    def n(self) -> int:
        return int(self.training_scores.shape[0])


@dataclass(frozen=True, eq=False)
class PValueVector:
    """P-value per candidate label, indexed by label id"""
    labels: Tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        if len(self.labels) != self.values.shape[0]:
            raise ValueError("one p-value per label is required")

    def __getitem__(self, label: str) -> float:
        return float(self.values[self.labels.index(label)])

    @property
    def per_label(self) -> Dict[str, float]:
        return {label: float(p) for label, p in zip(self.labels, self.values)}


@dataclass(frozen=True)
class PredictionSet:
    """Labels whose p-value exceeds the significance level"""
    labels: FrozenSet[str]
    significance: float

    def __contains__(self, label: object) -> bool:
        return label in self.labels

    def __len__(self) -> int:
        return len(self.labels)
