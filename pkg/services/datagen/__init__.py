"""
Synthetic datasets, CSV I/O and splitting

Generators are pure functions of their GenSpec (seed included).
"""
import csv
import logging
import math
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from common.exceptions.dataset import DatasetParseError
from common.models import Dataset, TaskKind
from common.schemas.datagen import GenSpec

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


# ==================== Generators ====================
def class_centers(n_classes: int, p: int, class_sep: float, rng: np.random.Generator) -> np.ndarray:
    """
    Centers pairwise class_sep apart along random orthogonal directions

    With more classes than dimensions the centers are spaced class_sep
    apart along a single random direction instead.
    """
    if n_classes <= p:
        Q, _ = np.linalg.qr(rng.standard_normal((p, n_classes)))
        return (class_sep / math.sqrt(2.0)) * Q.T
    u = rng.standard_normal(p)
    u /= np.linalg.norm(u)
    return class_sep * np.arange(n_classes)[:, None] * u[None, :]


def gen_classification(spec: GenSpec) -> Dataset:
    """Isotropic unit-variance Gaussian blobs, round-robin labels, shuffled"""
    rng = np.random.default_rng(spec.seed)
    centers = class_centers(spec.n_classes, spec.p, spec.class_sep, rng)
    labels = np.arange(spec.n) % spec.n_classes
    X = centers[labels] + rng.standard_normal((spec.n, spec.p))
    order = rng.permutation(spec.n)
    alphabet = tuple(str(c) for c in range(spec.n_classes))
    logger.debug(f"Generated classification data: n={spec.n}, p={spec.p}, classes={spec.n_classes}")
    return Dataset(X=X[order], y=labels[order], label_alphabet=alphabet, task="classification")


def gen_regression(spec: GenSpec) -> Dataset:
    """y = beta^T x + N(0, noise_sd^2) with standard normal x and beta"""
    rng = np.random.default_rng(spec.seed)
    beta = rng.standard_normal(spec.p)
    X = rng.standard_normal((spec.n, spec.p))
    y = X @ beta + spec.noise_sd * rng.standard_normal(spec.n)
    logger.debug(f"Generated regression data: n={spec.n}, p={spec.p}, noise_sd={spec.noise_sd}")
    return Dataset(X=X, y=y, task="regression")


def generate(spec: GenSpec) -> Dataset:
    if spec.task == "classification":
        return gen_classification(spec)
    return gen_regression(spec)


def train_test_split(dataset: Dataset, n_train: int) -> Tuple[Dataset, Dataset]:
    """Positional split into the first n_train examples and the rest"""
    if not 0 <= n_train <= dataset.n:
        raise ValueError(f"n_train must be in [0, {dataset.n}], got {n_train}")
    return dataset.head(n_train), dataset.tail(n_train)


# ==================== CSV ====================
def _header(p: int) -> List[str]:
    return [f"f{j + 1}" for j in range(p)] + ["label"]


def save_csv(dataset: Dataset, path: PathLike) -> None:
    """Write header f1..fp,label and one row per example (shortest round-trip floats)"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_header(dataset.dim))
        for i in range(dataset.n):
            if dataset.task == "classification":
                label = dataset.label_alphabet[int(dataset.y[i])]
            else:
                label = repr(float(dataset.y[i]))
            writer.writerow([repr(float(v)) for v in dataset.X[i]] + [label])
    logger.info(f"Saved {dataset.n} examples to {path}")


def _parse_float(token: str, line: int, path: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise DatasetParseError(f"not a number: {token!r}", line=line, path=path) from None


def load_csv(
    path: PathLike,
    task: TaskKind = "classification",
    label_alphabet: Optional[Sequence[str]] = None,
) -> Dataset:
    """
    Read a dataset written by save_csv

    Args:
        path: CSV file with header f1..fp,label
        task: classification keeps label tokens, regression parses floats
        label_alphabet: fixed alphabet; inferred when omitted

    Raises:
        DatasetParseError: missing/invalid header, wrong field count or bad number (names the line)
        UnknownLabelError: label outside the given alphabet
    """
    where = str(path)
    with Path(path).open("r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DatasetParseError("missing header", line=1, path=where)
        p = len(header) - 1
        if p < 1 or header != _header(p):
            raise DatasetParseError("header must be f1,...,fp,label", line=1, path=where)
        rows: List[List[float]] = []
        labels: List[str] = []
        for record in reader:
            line = reader.line_num
            if not record:
                continue
            if len(record) != p + 1:
                raise DatasetParseError(f"expected {p + 1} fields, got {len(record)}", line=line, path=where)
            rows.append([_parse_float(token, line, where) for token in record[:p]])
            labels.append(record[p].strip())
            if task == "regression":
                _parse_float(labels[-1], line, where)

    X = np.asarray(rows, dtype=np.float64).reshape(len(rows), p)
    if task == "regression":
        return Dataset(X=X, y=np.asarray([float(v) for v in labels]), task="regression")
    if not rows:
        return Dataset.empty(p, tuple(label_alphabet or ()), task="classification")
    return Dataset.from_tokens(X, labels, label_alphabet)


__all__ = [
    "class_centers",
    "gen_classification",
    "gen_regression",
    "generate",
    "train_test_split",
    "save_csv",
    "load_csv",
]
