"""
Timed benchmark sweep over (measure, variant, n, seed) cells
"""
import time
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterator, List, Optional, Tuple

import numpy as np

from common.models import Dataset
from common.schemas.bench import BenchRecord, RunConfig
from common.schemas.datagen import GenSpec
from common.schemas.scorer import MeasureKind, ScorerConfig, Variant
from middlewares.exception_handler import format_error_response
from services.conformal.engine import classify_batch
from services.datagen import generate, train_test_split
from services.icp import icp_calibrate, icp_classify, split_size
from services.measures import build_scorer
from services.regression import KnnRegressor, icp_regression_calibrate
from workers.base_worker import BaseWorker
from workers.prediction_pool import PredictionPool

# (m, p) test objects -> one prediction per row
Predictor = Callable[[np.ndarray], object]

# measures whose optimized scorers share distances across a batch of test points
_BATCHED = frozenset({MeasureKind.NN, MeasureKind.KNN, MeasureKind.SIMPLIFIED_KNN, MeasureKind.KDE})


@dataclass(frozen=True)
class BenchCell:
    measure: MeasureKind
    variant: Variant
    n: int
    seed: int

    @property
    def series(self) -> Tuple[MeasureKind, Variant, int]:
        return self.measure, self.variant, self.seed


@dataclass
class _Trained:
    predict: Predictor
    state_bytes: int
    bootstrap_draws: Optional[int] = None
    batch_size: int = 1


def _per_row(predict_one: Callable[[np.ndarray], object]) -> Predictor:
    return lambda rows: [predict_one(x) for x in rows]


def scorer_config(config: RunConfig, measure: MeasureKind, seed: int) -> ScorerConfig:
    """Measure hyperparameters of a bench run"""
    return ScorerConfig(
        measure=measure,
        k=config.k,
        h=config.h,
        rho=config.rho,
        B=config.B,
        tree_max_depth=config.tree_max_depth,
        seed=seed,
    )


class BenchWorker(BaseWorker):
    """
    Runs every cell of a RunConfig and records one BenchRecord per cell

    Training and prediction are timed with time.perf_counter. Optimized
    k-NN and KDE scorers predict config.batch_size test points per timed
    call and every other predictor one point per call; the mean per-point
    time divides each call by its batch length. The timeout is checked
    before every call; once a series (measure, variant, seed) times out,
    its larger n cells are recorded as timed out without running. A cell that raises is recorded with its error and the
    sweep continues.

    Args:
        config: sweep parameters
        sink: called with each record as soon as it is produced
    """

    def __init__(
        self,
        config: RunConfig,
        sink: Optional[Callable[[BenchRecord], None]] = None,
        name: str = "bench",
    ) -> None:
        super().__init__(name)
        self.config = config
        self.sink = sink
        self.records: List[BenchRecord] = []
        self._timed_out_at: Dict[Tuple[MeasureKind, Variant, int], int] = {}
        self._pool = PredictionPool(max_workers=4) if config.parallel else None

    def cells(self) -> Iterator[BenchCell]:
        """Cells in run order, n ascending within each (measure, variant)"""
        measures = self.config.measures if self.config.task == "classification" else (MeasureKind.KNN,)
        for measure in measures:
            for variant in self.config.variants:
                for n in self.config.n_grid:
                    for seed in self.config.seeds:
                        yield BenchCell(measure=measure, variant=variant, n=n, seed=seed)

    @property
    def total_cells(self) -> int:
        measures = len(self.config.measures) if self.config.task == "classification" else 1
        return measures * len(self.config.variants) * len(self.config.n_grid) * len(self.config.seeds)

    def process(self) -> None:
        for cell in self.cells():
            if not self.running:
                self.logger.warning(f"{self.name} stopped before all cells ran")
                break
            record = self.run_cell(cell)
            self.records.append(record)
            if self.sink is not None:
                self.sink(record)

    # ==================== Cells ====================
    def _data(self, cell: BenchCell) -> Tuple[Dataset, Dataset]:
        spec = GenSpec(
            task=self.config.task,
            n=cell.n + self.config.test_points,
            p=self.config.p,
            n_classes=self.config.n_classes,
            class_sep=self.config.class_sep,
            seed=cell.seed,
        )
        return train_test_split(generate(spec), cell.n)

    def _train(self, cell: BenchCell, train: Dataset) -> _Trained:
        config = self.config
        if config.task == "regression":
            if cell.variant == Variant.ICP:
                regressor = icp_regression_calibrate(train, split_size(train.n, config.train_fraction), config.k)
                return _Trained(
                    predict=_per_row(lambda x: regressor.interval(x, config.epsilon)),
                    state_bytes=int(regressor.proper.X.nbytes + regressor.residuals.nbytes),
                )
            knn = KnnRegressor(train, config.k, optimized=cell.variant == Variant.OPTIMIZED)
            return _Trained(predict=_per_row(lambda x: knn.predict(x, config.epsilon)), state_bytes=knn.memory_bytes())

        scorer_cfg = scorer_config(config, cell.measure, cell.seed)
        if cell.variant == Variant.ICP:
            calibration = icp_calibrate(train, split_size(train.n, config.train_fraction), scorer_cfg)
            return _Trained(predict=_per_row(lambda x: icp_classify(calibration, x)),
                            state_bytes=calibration.memory_bytes())

        scorer = build_scorer(train, scorer_cfg, cell.variant)
        draws = getattr(scorer, "draws", None)
        if self._pool is not None:
            pool = self._pool
            return _Trained(predict=lambda rows: pool.map(scorer, rows), state_bytes=scorer.memory_bytes(),
                            bootstrap_draws=draws)
        batch = config.batch_size if cell.measure in _BATCHED and cell.variant == Variant.OPTIMIZED else 1
        return _Trained(predict=lambda rows: classify_batch(scorer, rows), state_bytes=scorer.memory_bytes(),
                        bootstrap_draws=draws, batch_size=batch)

    def _skipped(self, cell: BenchCell, limit_n: int) -> BenchRecord:
        return BenchRecord(
            task=self.config.task,
            measure=cell.measure,
            variant=cell.variant,
            n=cell.n,
            seed=cell.seed,
            train_seconds=0.0,
            mean_predict_seconds=0.0,
            predictions_completed=0,
            predictions_requested=self.config.test_points,
            timed_out=True,
            error=f"skipped: timed out at n={limit_n}",
        )

    def run_cell(self, cell: BenchCell) -> BenchRecord:
        """Train, then predict until the test points are used up or the timeout passes"""
        extra = {"measure": cell.measure.value, "variant": cell.variant.value, "n": cell.n, "seed": cell.seed}
        limit_n = self._timed_out_at.get(cell.series)
        if limit_n is not None:
            self.logger.info(f"Skipping cell after timeout at n={limit_n}", extra=extra)
            return self._skipped(cell, limit_n)

        requested = self.config.test_points
        train_seconds = 0.0
        predict_seconds: List[float] = []
        timed_out = False
        state_bytes = 0
        draws: Optional[int] = None
        error: Optional[str] = None

        cell_start = time.perf_counter()
        try:
            train, test = self._data(cell)
            start = time.perf_counter()
            trained = self._train(cell, train)
            train_seconds = time.perf_counter() - start
            state_bytes = trained.state_bytes
            draws = trained.bootstrap_draws

            for start_row in range(0, test.n, trained.batch_size):
                if time.perf_counter() - cell_start > self.config.timeout_seconds:
                    timed_out = True
                    break
                rows = test.X[start_row:start_row + trained.batch_size]
                start = time.perf_counter()
                trained.predict(rows)
                elapsed = time.perf_counter() - start
                predict_seconds.extend([elapsed / rows.shape[0]] * rows.shape[0])
        except Exception as exc:
            payload = format_error_response(exc)
            error = f"{payload['error']}: {payload['message']}"
            self.logger.error(f"Cell failed: {error}", extra=extra)

        if timed_out:
            self._timed_out_at[cell.series] = cell.n
            self.logger.warning(
                f"Cell timed out after {len(predict_seconds)}/{requested} predictions", extra=extra
            )

        record = BenchRecord(
            task=self.config.task,
            measure=cell.measure,
            variant=cell.variant,
            n=cell.n,
            seed=cell.seed,
            train_seconds=train_seconds,
            mean_predict_seconds=float(np.mean(predict_seconds)) if predict_seconds else 0.0,
            predictions_completed=len(predict_seconds),
            predictions_requested=requested,
            timed_out=timed_out,
            state_bytes=state_bytes,
            bootstrap_draws=draws,
            error=error,
        )
        self.logger.info(
            f"Cell done: train={record.train_seconds:.4f}s predict={record.mean_predict_seconds:.6f}s "
            f"completed={record.predictions_completed}/{requested}",
            extra=extra,
        )
        return record

    def get_status(self) -> Dict[str, Any]:
        status = super().get_status()
        status.update({"cells_done": len(self.records), "cells_total": self.total_cells})
        return status
