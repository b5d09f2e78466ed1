"""
Online p-value stream

Each arriving example is first scored against every previous example
(p-value of its true label) and then learnt. Incremental scorers learn
through observe; the others are rebuilt from scratch, which gives the
reference cost curve. Besides wall time every step records the number of
pairwise distance evaluations it made, a cost measure that does not
depend on the machine or on interpreter overhead.
"""
import logging
import time
from dataclasses import dataclass
from typing import Iterator, List, Optional

import numpy as np

from common.models import Dataset, Example
from common.schemas.scorer import ScorerConfig, Variant
from services.conformal.pvalues import compute_pvalue, compute_smoothed_pvalue
from services.measures.distances import count_pairs

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OnlineStep:
    """
    Attributes:
        index: position of the example in the stream
        p_value: p-value of the true label against the previous examples
        step_seconds: time spent predicting and learning this example
        cumulative_seconds: total time since the stream started
        pairs: distance evaluations made by this step
        cumulative_pairs: distance evaluations since the stream started
    """
    index: int
    p_value: float
    step_seconds: float
    cumulative_seconds: float
    pairs: int = 0
    cumulative_pairs: int = 0


class OnlinePredictor:
    """
    Streaming full-CP predictor

    Args:
        initial: examples known before the stream starts (may be empty;
            fixes the label alphabet and the dimension)
        config: measure and hyperparameters
        variant: standard or optimized scorer
        smoothing: emit smoothed p-values
        seed: seed of the smoothing draws
    """

    def __init__(
        self,
        initial: Dataset,
        config: ScorerConfig,
        variant: Variant = Variant.OPTIMIZED,
        smoothing: bool = False,
        seed: Optional[int] = None,
    ) -> None:
        from services.measures import build_scorer

        self._build = build_scorer
        self.config = config
        self.variant = variant
        self.smoothing = smoothing
        self._rng = np.random.default_rng(config.seed if seed is None else seed)
        self.scorer = build_scorer(initial, config, variant)
        self.steps: List[OnlineStep] = []
        self._elapsed = 0.0
        self._pairs = 0

    @property
    def n(self) -> int:
        return self.scorer.n

    def process(self, example: Example) -> OnlineStep:
        """Predict the example's own label, then learn the example"""
        start = time.perf_counter()
        with count_pairs() as counter:
            p = self._predict_then_learn(example)
        step_seconds = time.perf_counter() - start
        self._elapsed += step_seconds
        self._pairs += counter.pairs
        step = OnlineStep(index=len(self.steps), p_value=p, step_seconds=step_seconds,
                          cumulative_seconds=self._elapsed, pairs=counter.pairs, cumulative_pairs=self._pairs)
        self.steps.append(step)
        return step

    def _predict_then_learn(self, example: Example) -> float:
        x = self.scorer.dataset.check_object(example.object)
        label = int(example.label)
        scores = self.scorer.score_vector(x, label)
        if self.smoothing:
            p = compute_smoothed_pvalue(scores, float(self._rng.uniform()))
        else:
            p = compute_pvalue(scores)

        if self.scorer.incremental:
            self.scorer = self.scorer.observe(Example(object=x, label=label))
        else:
            self.scorer = self._build(self.scorer.dataset.with_example(x, label), self.config, self.variant)
        return p

    def run(self, stream: Dataset) -> Iterator[OnlineStep]:
        """Process every example of stream in order"""
        logger.info(f"Online stream: {stream.n} examples, measure={self.config.measure.value}, "
                    f"variant={self.variant.value}")
        for i in range(stream.n):
            yield self.process(stream.example(i))
