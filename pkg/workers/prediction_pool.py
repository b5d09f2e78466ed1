"""
Parallel full-CP prediction over (test point, label) pairs
"""
import contextvars
from concurrent.futures import ThreadPoolExecutor
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from common.models import PValueVector
from workers.base_worker import BaseWorker

if TYPE_CHECKING:
    from services.measures.base import NonconformityScorer


class PredictionPool(BaseWorker):
    """
    Computes p-values for many test objects against one trained scorer

    The scorer is shared read-only between threads. Each (test point,
    label) pair is an independent job; results are placed by index so the
    output does not depend on completion order. With max_workers=1 the
    pairs are evaluated serially in the calling thread.

    Usage:
        pool = PredictionPool(max_workers=4)
        pvalues = pool.map(scorer, test.X)
    """

    def __init__(self, max_workers: int = 1, name: str = "prediction_pool") -> None:
        super().__init__(name)
        if max_workers < 1:
            raise ValueError(f"max_workers must be >= 1, got {max_workers}")
        self.max_workers = max_workers
        self._scorer: Optional["NonconformityScorer"] = None
        self._objects: Optional[np.ndarray] = None
        self._values: Optional[np.ndarray] = None
        self.pairs_done = 0

    def map(self, scorer: "NonconformityScorer", objects: np.ndarray) -> List[PValueVector]:
        """
        P-value vector of every row of objects

        Raises:
            whatever the scorer raises for a pair (re-raised after the pool stops)
        """
        dataset = scorer.dataset
        rows = np.atleast_2d(np.asarray(objects, dtype=np.float64))
        self._scorer = scorer
        self._objects = np.stack([dataset.check_object(row) for row in rows]) if rows.shape[0] else rows
        self._values = np.empty((rows.shape[0], dataset.n_labels))
        self.start()
        if self.error is not None:
            raise self.error
        return [PValueVector(labels=dataset.label_alphabet, values=row) for row in self._values]

    def classify(self, scorer: "NonconformityScorer", test_object: np.ndarray) -> PValueVector:
        """Parallel over the candidate labels of a single test object"""
        return self.map(scorer, np.asarray(test_object, dtype=np.float64)[None, :])[0]

    def _pairs(self) -> List[Tuple[int, int]]:
        assert self._objects is not None and self._scorer is not None
        n_labels = self._scorer.dataset.n_labels
        return [(i, label) for i in range(self._objects.shape[0]) for label in range(n_labels)]

    def _evaluate(self, pair: Tuple[int, int]) -> float:
        assert self._objects is not None and self._scorer is not None
        i, label = pair
        return self._scorer.pvalue(self._objects[i], label)

    def process(self) -> None:
        assert self._values is not None
        pairs = self._pairs()
        self.pairs_done = 0
        if self.max_workers == 1:
            for pair in pairs:
                self._values[pair] = self._evaluate(pair)
                self.pairs_done += 1
            return

        with ThreadPoolExecutor(max_workers=self.max_workers, thread_name_prefix=self.name) as executor:
            # one context copy per job: a Context cannot be entered by two threads at once
            futures = [
                (pair, executor.submit(contextvars.copy_context().run, self._evaluate, pair))
                for pair in pairs
            ]
            for pair, future in futures:
                self._values[pair] = future.result()
                self.pairs_done += 1
        self.logger.debug(f"{self.name}: {self.pairs_done} pairs on {self.max_workers} threads")

    def get_status(self) -> Dict[str, Any]:
        status = super().get_status()
        status.update({"max_workers": self.max_workers, "pairs_done": self.pairs_done})
        return status


def parallel_classify(
    scorer: "NonconformityScorer", objects: Sequence[np.ndarray], max_workers: int
) -> List[PValueVector]:
    """Convenience wrapper around a one-shot PredictionPool"""
    return PredictionPool(max_workers=max_workers).map(scorer, np.asarray(objects, dtype=np.float64))
