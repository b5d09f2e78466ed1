"""
Fuzziness comparison controller: full CP against ICP with the same measure
"""
import logging
from typing import List, Optional, Tuple

import numpy as np

from common.schemas.bench import RunConfig
from common.schemas.datagen import GenSpec
from common.schemas.reports import FuzzinessReport, FuzzinessRow
from common.schemas.scorer import MeasureKind, Variant
from services.conformal import classify, fuzziness
from services.datagen import generate, train_test_split
from services.icp import icp_calibrate, icp_classify, split_size
from services.measures import build_scorer
from utils.stats import welch_test
from workers.bench_worker import scorer_config

logger = logging.getLogger(__name__)


def fuzziness_samples(config: RunConfig, measure: MeasureKind, n_train: int, n_test: int,
                      seed: int) -> Tuple[np.ndarray, np.ndarray]:
    """Per-test-point fuzziness of optimized full CP and of ICP on the same data"""
    spec = GenSpec(task="classification", n=n_train + n_test, p=config.p, n_classes=config.n_classes,
                   class_sep=config.class_sep, seed=seed)
    train, test = train_test_split(generate(spec), n_train)
    cfg = scorer_config(config, measure, seed)

    scorer = build_scorer(train, cfg, Variant.OPTIMIZED)
    cp = np.array([fuzziness(classify(scorer, x)) for x in test.X])

    calibration = icp_calibrate(train, split_size(n_train, config.train_fraction), cfg)
    icp = np.array([fuzziness(icp_classify(calibration, x)) for x in test.X])
    return cp, icp


def compare_fuzziness(
    config: RunConfig,
    n_train: int,
    n_test: int,
    *,
    seed: int = 0,
    alpha: float = 0.01,
    measures: Optional[Tuple[MeasureKind, ...]] = None,
) -> FuzzinessReport:
    """
    Mean +/- sd fuzziness of CP and ICP per measure, with a one-sided Welch test

    H0 is "ICP has a smaller fuzziness than CP"; it is rejected when the
    Welch p-value is below alpha.
    """
    rows: List[FuzzinessRow] = []
    for measure in measures or config.measures:
        cp, icp = fuzziness_samples(config, measure, n_train, n_test, seed)
        welch = welch_test(cp, icp, alpha)
        row = FuzzinessRow(
            measure=measure,
            cp_mean=float(np.mean(cp)),
            cp_sd=float(np.std(cp, ddof=1)),
            icp_mean=float(np.mean(icp)),
            icp_sd=float(np.std(icp, ddof=1)),
            cp_not_worse=bool(np.mean(cp) <= np.mean(icp)),
            welch=welch,
        )
        logger.info(
            f"Fuzziness CP {row.cp_mean:.4f} vs ICP {row.icp_mean:.4f}, Welch p={welch.p_value:.3g}",
            extra={"measure": measure.value},
        )
        rows.append(row)
    return FuzzinessReport(n_train=n_train, n_test=n_test, n_classes=config.n_classes, seed=seed, rows=rows)
