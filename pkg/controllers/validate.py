"""
Coverage validation controller

Monte-Carlo check of P(y not in prediction set) <= epsilon

The guarantee is marginal over the training set, so the test points are
spread over several independently drawn training sets. With a single
training set the estimate is conditional on that set and may exceed the
band more often than the nominal rate.
"""
import logging
from typing import Callable, List, Sequence

import numpy as np

from common.models import IntervalSet
from common.schemas.bench import RunConfig
from common.schemas.datagen import GenSpec
from common.schemas.reports import CoverageReport, CoverageRow
from common.schemas.scorer import MeasureKind, Variant
from services.conformal import classify_batch
from services.datagen import generate, train_test_split
from services.icp import icp_calibrate, icp_classify, split_size
from services.measures import build_scorer
from services.regression import KnnRegressor, icp_regression_calibrate
from utils.stats import binomial_upper_band
from workers.bench_worker import scorer_config

logger = logging.getLogger(__name__)

DEFAULT_EPSILONS = (0.05, 0.1, 0.2)


def _true_label_pvalues(config: RunConfig, measure: MeasureKind, variant: Variant, n_train: int, n_test: int,
                        seed: int) -> np.ndarray:
    spec = GenSpec(task="classification", n=n_train + n_test, p=config.p, n_classes=config.n_classes,
                   class_sep=config.class_sep, seed=seed)
    train, test = train_test_split(generate(spec), n_train)
    cfg = scorer_config(config, measure, seed)
    if variant == Variant.ICP:
        calibration = icp_calibrate(train, split_size(n_train, config.train_fraction), cfg)
        return np.array([icp_classify(calibration, x).values[y] for x, y in zip(test.X, test.y)])
    scorer = build_scorer(train, cfg, variant)
    return np.array([pv.values[y] for pv, y in zip(classify_batch(scorer, test.X), test.y)])


def _regression_errors(config: RunConfig, variant: Variant, n_train: int, n_test: int, seed: int,
                       epsilons: Sequence[float]) -> List[int]:
    spec = GenSpec(task="regression", n=n_train + n_test, p=config.p, seed=seed)
    train, test = train_test_split(generate(spec), n_train)
    errors = [0] * len(epsilons)
    predict: Callable[[np.ndarray, float], IntervalSet]
    if variant == Variant.ICP:
        regressor = icp_regression_calibrate(train, split_size(n_train, config.train_fraction), config.k)
        predict = regressor.interval
    else:
        predict = KnnRegressor(train, config.k, optimized=variant == Variant.OPTIMIZED).predict
    for x, y in zip(test.X, test.y):
        for j, eps in enumerate(epsilons):
            if not predict(x, eps).contains(float(y)):
                errors[j] += 1
    return errors


def replicate_seeds(seed: int, count: int) -> List[int]:
    """Independent data seeds derived from one run seed"""
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(count)]


def validate_coverage(
    config: RunConfig,
    n_train: int,
    n_test: int,
    *,
    epsilons: Sequence[float] = DEFAULT_EPSILONS,
    variant: Variant = Variant.OPTIMIZED,
    seed: int = 0,
    training_sets: int = 1,
) -> CoverageReport:
    """
    Empirical error rate per (measure, epsilon) against the binomial 2-sigma band

    A label is an error when its p-value is <= epsilon, i.e. it is left
    out of the prediction set. Rows: one per epsilon and selected measure.

    Args:
        training_sets: independent training sets the n_test points are
            split over (as evenly as possible); each gets its own data seed

    Raises:
        ValueError: if training_sets is not in [1, n_test]
    """
    if not 1 <= training_sets <= n_test:
        raise ValueError(f"training_sets must be in [1, {n_test}], got {training_sets}")
    sizes = [len(chunk) for chunk in np.array_split(np.arange(n_test), training_sets)]
    seeds = [seed] if training_sets == 1 else replicate_seeds(seed, training_sets)

    rows: List[CoverageRow] = []
    measures = config.measures if config.task == "classification" else (MeasureKind.KNN,)
    for measure in measures:
        errors = [0] * len(epsilons)
        for size, data_seed in zip(sizes, seeds):
            if config.task == "classification":
                pvalues = _true_label_pvalues(config, measure, variant, n_train, size, data_seed)
                found = [int(np.count_nonzero(pvalues <= eps)) for eps in epsilons]
            else:
                found = _regression_errors(config, variant, n_train, size, data_seed, epsilons)
            errors = [a + b for a, b in zip(errors, found)]
        for eps, err in zip(epsilons, errors):
            band = binomial_upper_band(eps, n_test)
            rate = err / n_test
            rows.append(CoverageRow(measure=measure, variant=variant, epsilon=eps, trials=n_test, errors=err,
                                    error_rate=rate, upper_band=band, passed=rate <= band))
            logger.info(f"Coverage eps={eps}: error rate {rate:.4f} (band {band:.4f})",
                        extra={"measure": measure.value, "variant": variant.value})
    return CoverageReport(n_train=n_train, seed=seed, training_sets=training_sets, rows=rows)
