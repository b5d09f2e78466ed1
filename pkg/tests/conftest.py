"""
Pytest configuration and fixtures

Seeded datasets and isolated settings
"""
import sys
from pathlib import Path
from typing import Callable

# Add project root to Python path for imports
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

import numpy as np
import pytest

from common.models import Dataset
from common.schemas.datagen import GenSpec
from config import Settings, load_settings
from services.datagen import gen_classification, gen_regression

DatasetFactory = Callable[..., Dataset]


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def make_classification() -> DatasetFactory:
    """
    Factory for seeded blob datasets

    Small dimension and separation keep scores well spread so that
    standard and optimized variants are compared on non-trivial ranks.
    """
    def _make(n: int, p: int = 5, n_classes: int = 2, seed: int = 0, class_sep: float = 1.5) -> Dataset:
        return gen_classification(GenSpec(n=n, p=p, n_classes=n_classes, class_sep=class_sep, seed=seed))

    return _make


@pytest.fixture
def make_regression() -> DatasetFactory:
    def _make(n: int, p: int = 1, seed: int = 0, noise_sd: float = 0.5) -> Dataset:
        return gen_regression(GenSpec(task="regression", n=n, p=p, noise_sd=noise_sd, seed=seed))

    return _make


@pytest.fixture
def toy_1d() -> Dataset:
    """{(0, A), (1, A), (3, B)} on the real line"""
    return Dataset(X=np.array([[0.0], [1.0], [3.0]]), y=np.array([0, 0, 1]), label_alphabet=("A", "B"))


@pytest.fixture
def test_settings(tmp_path: Path) -> Settings:
    """Settings writing reports to a temporary directory"""
    return load_settings(REPORT_DIR=tmp_path / "reports", ENVIRONMENT="development")
