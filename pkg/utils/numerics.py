"""
Summation helpers shared by standard and optimized scorers
"""
from typing import Tuple

import numpy as np


def compensated_sum(values: np.ndarray, axis: int = -1) -> np.ndarray:
    """
    Compensated pairwise summation along one axis

    Each pairwise addition is an error-free TwoSum; the rounding errors
    are accumulated separately and added back at the end, so the result
    is accurate to a few ulps independently of the axis length.

    Args:
        values: finite float array
        axis: axis to reduce

    Returns:
        Array with ``axis`` removed
    """
    a = np.moveaxis(np.asarray(values, dtype=np.float64), axis, -1)
    if a.shape[-1] == 0:
        return np.zeros(a.shape[:-1])
    err = np.zeros(a.shape[:-1])
    while a.shape[-1] > 1:
        if a.shape[-1] % 2:
            a = np.concatenate([a, np.zeros(a.shape[:-1] + (1,))], axis=-1)
        x = a[..., 0::2]
        y = a[..., 1::2]
        s = x + y
        bp = s - x
        err += ((x - (s - bp)) + (y - bp)).sum(axis=-1)
        a = s
    return a[..., 0] + err


def multiset_row_sums(rows: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Sum of the finite entries of each row, independent of their order

    Rows are padded with +inf where fewer values exist, so the count of
    finite entries is returned alongside the sums. The finite entries of
    a row are sorted and accumulated left to right; the result is a
    function of the row's multiset of values, so two rows holding the
    same values in any order (or in arrays of any shape) sum to the same
    float.

    Returns:
        (sums, counts); sums are 0.0 for rows without finite entries
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    finite = np.isfinite(rows)
    counts = finite.sum(axis=1)
    if rows.shape[1] == 0:
        return np.zeros(rows.shape[0]), counts
    # non-finite entries sort last and then contribute an exact +0.0
    ordered = np.sort(np.where(finite, rows, np.inf), axis=1)
    ordered[~np.isfinite(ordered)] = 0.0
    return np.cumsum(ordered, axis=1)[:, -1], counts
