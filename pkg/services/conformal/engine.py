"""
Full-CP classification engine

Generic over any trained scorer: one score vector per candidate label,
mapped through the rank p-value.
"""
import logging
from typing import TYPE_CHECKING, List, Optional

import numpy as np

from common.models import Example, PValueVector
from services.conformal.pvalues import compute_smoothed_pvalue

if TYPE_CHECKING:
    from services.measures.base import NonconformityScorer

logger = logging.getLogger(__name__)


def classify(
    scorer: "NonconformityScorer",
    test_object: np.ndarray,
    *,
    smoothing: bool = False,
    rng: Optional[np.random.Generator] = None,
) -> PValueVector:
    """
    P-value of every candidate label for one test object

    Args:
        scorer: trained scorer; it carries the training set Z
        test_object: object x of the dataset's dimension
        smoothing: use smoothed p-values, one tau draw per label
        rng: source of tau; required when smoothing

    Returns:
        PValueVector keyed by the dataset's label alphabet

    Raises:
        DimensionMismatchError: if x has the wrong dimension
        DegenerateUpdateError: from LS-SVM updates
    """
    dataset = scorer.dataset
    x = dataset.check_object(test_object)
    if smoothing and rng is None:
        raise ValueError("smoothed p-values need an rng")
    if not smoothing:
        return PValueVector(labels=dataset.label_alphabet, values=scorer.pvalues_batch(x[None, :])[0])
    assert rng is not None
    values = np.empty(dataset.n_labels)
    for label in range(dataset.n_labels):
        values[label] = compute_smoothed_pvalue(scorer.score_vector(x, label), float(rng.uniform()))
    return PValueVector(labels=dataset.label_alphabet, values=values)


def classify_batch(scorer: "NonconformityScorer", test_objects: np.ndarray) -> List[PValueVector]:
    """
    P-value vectors of a batch of test objects

    Optimized k-NN and KDE scorers share the pairwise distances of the
    batch across labels; the result equals one classify call per row.

    Raises:
        DimensionMismatchError: if the rows have the wrong dimension
    """
    values = scorer.pvalues_batch(test_objects)
    return [PValueVector(labels=scorer.dataset.label_alphabet, values=row) for row in values]


def observe(scorer: "NonconformityScorer", new_example: Example) -> "NonconformityScorer":
    """
    Learn one example after predicting it

    Returns a new scorer equivalent to retraining on Z + {new_example}.

    Raises:
        NotIncrementalError: for standard and bootstrap scorers
    """
    updated = scorer.observe(new_example)
    logger.debug(f"Observed example {scorer.n}: {updated!r}")
    return updated

