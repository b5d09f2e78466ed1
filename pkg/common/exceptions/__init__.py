"""
Custom exceptions package
"""
from common.exceptions.conformal import (
    BootstrapSamplingError,
    ConformalException,
    DegenerateUpdateError,
    FeatureMapError,
    InsufficientDataError,
    InvalidSplitError,
    NotIncrementalError,
    UnknownMeasureError,
    UnsupportedLabelsError,
)
from common.exceptions.dataset import (
    DatasetException,
    DatasetParseError,
    DimensionMismatchError,
    UnknownLabelError,
)

__all__ = [
    "BootstrapSamplingError",
    "ConformalException",
    "DegenerateUpdateError",
    "FeatureMapError",
    "InsufficientDataError",
    "InvalidSplitError",
    "NotIncrementalError",
    "UnknownMeasureError",
    "UnsupportedLabelsError",
    "DatasetException",
    "DatasetParseError",
    "DimensionMismatchError",
    "UnknownLabelError",
]
