"""
Prediction controller

Turns a training set and test objects into a PredictionReport
"""
import logging
from typing import FrozenSet, List, Optional, Tuple

import numpy as np

from common.models import Dataset, IntervalSet
from common.schemas.reports import PredictionReport, PredictionRow
from common.schemas.scorer import MeasureKind, ScorerConfig, Variant
from services.conformal import classify, prediction_set
from services.icp import icp_calibrate, icp_classify
from services.measures import build_scorer
from services.regression import KnnRegressor, grid_prediction_set, icp_regression_calibrate, reg_prediction_set
from workers.prediction_pool import PredictionPool

logger = logging.getLogger(__name__)

GRID_STEP = 1e-3


def _ordered(labels: FrozenSet[str], alphabet: Tuple[str, ...]) -> List[str]:
    return [label for label in alphabet if label in labels]


def predict_classification(
    train: Dataset,
    test_objects: np.ndarray,
    config: ScorerConfig,
    variant: Variant,
    epsilon: float,
    *,
    smoothing: bool = False,
    t: Optional[int] = None,
    workers: int = 1,
) -> PredictionReport:
    """
    P-values and prediction sets of every test object

    Args:
        train: training set Z
        test_objects: one object per row
        config: measure and hyperparameters (config.seed seeds smoothing)
        variant: standard, optimized or icp
        epsilon: significance level
        smoothing: smoothed full-CP p-values
        t: ICP proper-training size
        workers: threads for full-CP prediction over (test point, label) pairs
    """
    objects = np.atleast_2d(np.asarray(test_objects, dtype=np.float64))
    if variant == Variant.ICP:
        calibration = icp_calibrate(train, t, config)
        pvalues = [icp_classify(calibration, x) for x in objects]
    else:
        scorer = build_scorer(train, config, variant)
        if workers > 1 and not smoothing:
            pvalues = PredictionPool(max_workers=workers).map(scorer, objects)
        else:
            rng = np.random.default_rng(config.seed) if smoothing else None
            pvalues = [classify(scorer, x, smoothing=smoothing, rng=rng) for x in objects]

    rows = [
        PredictionRow(
            index=i,
            p_values=pv.per_label,
            prediction_set=_ordered(prediction_set(pv, epsilon).labels, train.label_alphabet),
        )
        for i, pv in enumerate(pvalues)
    ]
    logger.info(f"Predicted {len(rows)} test objects", extra={"measure": config.measure.value, "variant": variant.value})
    return PredictionReport(
        task="classification",
        measure=config.measure,
        variant=variant,
        epsilon=epsilon,
        n_train=train.n,
        rows=rows,
    )


def dense_grid(labels: np.ndarray, step: float = GRID_STEP) -> np.ndarray:
    """Grid over [min y - range, max y + range] with the given step"""
    lo, hi = float(np.min(labels)), float(np.max(labels))
    span = max(hi - lo, step)
    return np.arange(lo - span, hi + span + step / 2, step)


def predict_regression(
    train: Dataset,
    test_objects: np.ndarray,
    k: int,
    variant: Variant,
    epsilon: float,
    *,
    t: Optional[int] = None,
    check_grid: bool = False,
) -> PredictionReport:
    """
    Prediction intervals of every test object

    With check_grid the full-CP set is also computed on a dense grid and
    compared endpoint by endpoint, with a tolerance of one grid step.
    """
    objects = np.atleast_2d(np.asarray(test_objects, dtype=np.float64))
    rows: List[PredictionRow] = []

    if variant == Variant.ICP:
        regressor = icp_regression_calibrate(train, t, k)
        for i, x in enumerate(objects):
            rows.append(PredictionRow(index=i, intervals=regressor.interval(x, epsilon).to_list()))
    else:
        knn = KnnRegressor(train, k, optimized=variant == Variant.OPTIMIZED)
        grid = dense_grid(train.y) if check_grid else None
        for i, x in enumerate(objects):
            coeffs = knn.coefficients(x)
            exact: IntervalSet = reg_prediction_set(coeffs, epsilon, train.n)
            row = PredictionRow(index=i, intervals=exact.to_list())
            if grid is not None:
                approx = grid_prediction_set(coeffs, epsilon, train.n, grid)
                row.grid_intervals = approx.to_list()
                row.grid_agrees = exact.close_to(approx, GRID_STEP)
                if not row.grid_agrees:
                    logger.warning(f"Grid oracle disagrees on test row {i}")
            rows.append(row)

    logger.info(f"Predicted {len(rows)} regression intervals", extra={"variant": variant.value, "k": k})
    return PredictionReport(
        task="regression",
        measure=MeasureKind.KNN,
        variant=variant,
        epsilon=epsilon,
        n_train=train.n,
        rows=rows,
    )
