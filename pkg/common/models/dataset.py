"""
Dataset and example models

Labels are interned to dense integer ids at construction; the external
label tokens live in ``label_alphabet`` and ``y[i]`` indexes into it.
Regression datasets keep real-valued ``y`` and an empty alphabet.
"""
from dataclasses import dataclass
from typing import Iterable, Literal, Optional, Sequence, Tuple, Union

import numpy as np

from common.exceptions.dataset import DimensionMismatchError, UnknownLabelError

TaskKind = Literal["classification", "regression"]


def _label_sort_key(token: str) -> Tuple[int, float, str]:
    try:
        return (0, float(token), token)
    except ValueError:
        return (1, 0.0, token)


def sort_label_tokens(tokens: Iterable[str]) -> Tuple[str, ...]:
    """Distinct label tokens, numeric-looking ones first in numeric order"""
    return tuple(sorted(set(tokens), key=_label_sort_key))


@dataclass(frozen=True)
class Example:
    """A single (object, label) pair; label is a dense id or a real target"""
    object: np.ndarray
    label: Union[int, float]


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Ordered training examples

    Attributes:
        X: (n, p) float64 objects
        y: (n,) int64 label ids (classification) or float64 targets (regression)
        label_alphabet: label tokens indexed by id (empty for regression)
        task: classification or regression
    """
    X: np.ndarray
    y: np.ndarray
    label_alphabet: Tuple[str, ...] = ()
    task: TaskKind = "classification"

    def __post_init__(self) -> None:
        X = np.array(self.X, dtype=np.float64, copy=True)
        if X.ndim == 1:
            X = X.reshape(-1, 1) if X.size else X.reshape(0, 0)
        if X.ndim != 2:
            raise DimensionMismatchError(expected=2, got=X.ndim)
        dtype = np.int64 if self.task == "classification" else np.float64
        y = np.array(self.y, dtype=dtype, copy=True).reshape(-1)
        if y.shape[0] != X.shape[0]:
            raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]} entries")
        if self.task == "classification" and y.size:
            if y.min() < 0 or y.max() >= len(self.label_alphabet):
                bad = int(y[(y < 0) | (y >= len(self.label_alphabet))][0])
                raise UnknownLabelError(str(bad))
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "label_alphabet", tuple(self.label_alphabet))

    # ==================== Construction ====================
    @classmethod
    def from_tokens(
        cls,
        X: np.ndarray,
        labels: Sequence[str],
        label_alphabet: Optional[Sequence[str]] = None,
    ) -> "Dataset":
        """
        Build a classification dataset from external label tokens

        Args:
            X: (n, p) objects
            labels: label token per row
            label_alphabet: fixed alphabet; inferred from the labels when omitted

        Raises:
            UnknownLabelError: if a label is not in the given alphabet
        """
        alphabet = tuple(label_alphabet) if label_alphabet is not None else sort_label_tokens(labels)
        index = {token: i for i, token in enumerate(alphabet)}
        ids = []
        for token in labels:
            if token not in index:
                raise UnknownLabelError(token)
            ids.append(index[token])
        return cls(X=np.asarray(X, dtype=np.float64), y=np.asarray(ids, dtype=np.int64),
                   label_alphabet=alphabet, task="classification")

    @classmethod
    def empty(cls, dim: int, label_alphabet: Sequence[str] = (), task: TaskKind = "classification") -> "Dataset":
        return cls(X=np.zeros((0, dim)), y=np.zeros(0), label_alphabet=tuple(label_alphabet), task=task)

    # ==================== Shape ====================
    @property
    def n(self) -> int:
        return int(self.X.shape[0])

    @property
    def dim(self) -> int:
        return int(self.X.shape[1])

    @property
    def n_labels(self) -> int:
        return len(self.label_alphabet)

    def __len__(self) -> int:
        return self.n

    def example(self, i: int) -> Example:
        label = int(self.y[i]) if self.task == "classification" else float(self.y[i])
        return Example(object=self.X[i], label=label)

    def label_counts(self) -> np.ndarray:
        """Examples per label id (classification only)"""
        return np.bincount(self.y, minlength=self.n_labels).astype(np.int64)

    def check_object(self, obj: np.ndarray) -> np.ndarray:
        """Return obj as a float vector of the dataset's dimension"""
        vec = np.asarray(obj, dtype=np.float64).reshape(-1)
        if vec.shape[0] != self.dim:
            raise DimensionMismatchError(expected=self.dim, got=vec.shape[0])
        return vec

    def check_objects(self, objects: np.ndarray) -> np.ndarray:
        """Return objects as an (m, p) float matrix; a single vector becomes one row"""
        rows = np.asarray(objects, dtype=np.float64)
        if rows.ndim == 1:
            rows = rows[None, :]
        if rows.ndim != 2 or rows.shape[1] != self.dim:
            raise DimensionMismatchError(expected=self.dim, got=int(rows.shape[-1]) if rows.ndim else 1)
        return rows

    # ==================== Derived datasets ====================
    def _replace(self, X: np.ndarray, y: np.ndarray) -> "Dataset":
        return Dataset(X=X, y=y, label_alphabet=self.label_alphabet, task=self.task)

    def with_example(self, obj: np.ndarray, label: Union[int, float]) -> "Dataset":
        """Dataset with (obj, label) appended as the last example"""
        vec = self.check_object(obj)
        return self._replace(np.vstack([self.X, vec[None, :]]), np.append(self.y, label))

    def without(self, i: int) -> "Dataset":
        """Dataset with example i removed (leave-one-out)"""
        return self._replace(np.delete(self.X, i, axis=0), np.delete(self.y, i))

    def subset(self, indices: Union[slice, np.ndarray, Sequence[int]]) -> "Dataset":
        return self._replace(self.X[indices], self.y[indices])

    def head(self, t: int) -> "Dataset":
        return self.subset(slice(0, t))

    def tail(self, t: int) -> "Dataset":
        """Examples t, t+1, ..., n-1"""
        return self.subset(slice(t, None))

    def equals(self, other: "Dataset") -> bool:
        return (
            self.task == other.task
            and self.label_alphabet == other.label_alphabet
            and self.X.shape == other.X.shape
            and bool(np.array_equal(self.X, other.X))
            and bool(np.array_equal(self.y, other.y))
        )
