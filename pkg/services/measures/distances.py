"""
Distance, kernel and feature-map registries

Only Euclidean distance and the Gaussian kernel ship by default; new
entries are registered by name.
"""
import contextvars
import itertools
import math
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, Optional

import numpy as np
from scipy.spatial.distance import cdist

from common.exceptions.conformal import FeatureMapError, UnknownMeasureError

DistanceFn = Callable[[np.ndarray, np.ndarray], np.ndarray]
KernelFn = Callable[[np.ndarray, int], np.ndarray]


# ==================== Work accounting ====================
@dataclass
class PairCounter:
    """Pairwise distance evaluations made while the counter was active"""
    pairs: int = 0


_pair_counter: contextvars.ContextVar[Optional[PairCounter]] = contextvars.ContextVar("pair_counter", default=None)


@contextmanager
def count_pairs() -> Iterator[PairCounter]:
    """
    Count the distance evaluations of the enclosed block

    Usage:
        with count_pairs() as counter:
            scorer.score_vector(x, label)
        counter.pairs
    """
    counter = PairCounter()
    token = _pair_counter.set(counter)
    try:
        yield counter
    finally:
        _pair_counter.reset(token)


def _record_pairs(m: int, n: int) -> None:
    counter = _pair_counter.get()
    if counter is not None:
        counter.pairs += m * n


# ==================== Distances and kernels ====================
def euclidean(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """(m, p) x (n, p) -> (m, n) distances; entry (i, j) is bitwise symmetric in its arguments"""
    A = np.atleast_2d(A)
    B = np.atleast_2d(B)
    _record_pairs(A.shape[0], B.shape[0])
    if A.shape[0] == 0 or B.shape[0] == 0:
        return np.zeros((A.shape[0], B.shape[0]))
    return cdist(A, B, metric="euclidean")


def gaussian(u_norm: np.ndarray, p: int) -> np.ndarray:
    """Gaussian kernel K(u) = (2 pi)^(-p/2) exp(-|u|^2 / 2), given |u|"""
    return (2.0 * math.pi) ** (-p / 2.0) * np.exp(-0.5 * np.square(u_norm))


DISTANCES: Dict[str, DistanceFn] = {"euclidean": euclidean}
KERNELS: Dict[str, KernelFn] = {"gaussian": gaussian}


def get_distance(name: str) -> DistanceFn:
    try:
        return DISTANCES[name]
    except KeyError:
        raise UnknownMeasureError("distance", name) from None


def get_kernel(name: str) -> KernelFn:
    try:
        return KERNELS[name]
    except KeyError:
        raise UnknownMeasureError("kernel", name) from None


# ==================== Feature maps ====================
@dataclass(frozen=True)
class FeatureMap:
    """Explicit finite-dimensional feature map phi: R^p -> R^q"""
    name: str
    input_dim: int
    degree: int = 1

    @property
    def output_dim(self) -> int:
        if self.name == "identity":
            return self.input_dim
        return sum(math.comb(self.input_dim + d - 1, d) for d in range(self.degree + 1))

    def __call__(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.input_dim:
            raise FeatureMapError(expected=self.input_dim, got=X.shape[1])
        if self.name == "identity":
            return X.copy()
        # bias, then monomials of increasing degree
        columns = [np.ones(X.shape[0])]
        for d in range(1, self.degree + 1):
            for combo in itertools.combinations_with_replacement(range(self.input_dim), d):
                columns.append(np.prod(X[:, list(combo)], axis=1))
        return np.column_stack(columns)


FEATURE_MAPS = ("identity", "polynomial")


def get_feature_map(name: str, input_dim: int, degree: int = 2) -> FeatureMap:
    if name in ("identity", "linear"):
        return FeatureMap("identity", input_dim)
    if name == "polynomial":
        return FeatureMap("polynomial", input_dim, degree)
    raise UnknownMeasureError("feature map", name)
