"""
Nonconformity measures package

Registry from measure kind to implementation, and scorer construction
for the standard and optimized variants.
"""
import logging
from typing import Dict, Type

from common.exceptions.conformal import UnknownMeasureError
from common.models import Dataset
from common.schemas.scorer import MeasureKind, ScorerConfig, Variant
from services.measures.base import NonconformityMeasure, NonconformityScorer, StandardScorer
from services.measures.bootstrap import BootstrapMeasure, BootstrapScorer
from services.measures.kde import KdeMeasure, KdeScorer
from services.measures.knn import KnnMeasure, KnnScorer
from services.measures.lssvm import LssvmMeasure, LssvmScorer

logger = logging.getLogger(__name__)

MEASURES: Dict[MeasureKind, Type[NonconformityMeasure]] = {
    MeasureKind.NN: KnnMeasure,
    MeasureKind.KNN: KnnMeasure,
    MeasureKind.SIMPLIFIED_KNN: KnnMeasure,
    MeasureKind.KDE: KdeMeasure,
    MeasureKind.LSSVM: LssvmMeasure,
    MeasureKind.BOOTSTRAP: BootstrapMeasure,
}


def get_measure(config: ScorerConfig) -> NonconformityMeasure:
    """Instantiate the measure named by config.measure"""
    try:
        cls = MEASURES[MeasureKind(config.measure)]
    except (KeyError, ValueError):
        raise UnknownMeasureError("measure", str(config.measure)) from None
    return cls(config)


def build_scorer(dataset: Dataset, config: ScorerConfig, variant: Variant = Variant.OPTIMIZED) -> NonconformityScorer:
    """
    Train a full-CP scorer

    Args:
        dataset: training set Z
        config: measure and hyperparameters
        variant: standard (literal recomputation) or optimized

    Raises:
        ValueError: for the ICP variant, which is built by services.icp
    """
    measure = get_measure(config)
    if variant == Variant.STANDARD:
        return measure.standard(dataset)
    if variant == Variant.OPTIMIZED:
        scorer = measure.train_optimized(dataset)
        logger.debug(f"Trained {config.measure.value} scorer on n={dataset.n}")
        return scorer
    raise ValueError(f"build_scorer does not build {variant.value} scorers")


__all__ = [
    "MEASURES",
    "get_measure",
    "build_scorer",
    "NonconformityMeasure",
    "NonconformityScorer",
    "StandardScorer",
    "KnnMeasure",
    "KnnScorer",
    "KdeMeasure",
    "KdeScorer",
    "LssvmMeasure",
    "LssvmScorer",
    "BootstrapMeasure",
    "BootstrapScorer",
]
