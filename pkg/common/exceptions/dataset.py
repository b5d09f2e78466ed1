"""
Dataset-specific exceptions
"""
from typing import Optional


class DatasetException(Exception):
    """Base exception for dataset loading and validation errors"""

    def __init__(self, message: str = "Dataset error", exit_code: int = 65):
        self.message = message
        self.exit_code = exit_code
        super().__init__(self.message)


class DatasetParseError(DatasetException):
    """Raised when a CSV row cannot be parsed"""

    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None):
        self.line = line
        self.path = path
        where = ""
        if path:
            where = f"{path}:"
        if line is not None:
            where = f"{where}{line}: "
        elif where:
            where = f"{where} "
        super().__init__(f"{where}{message}")


class DimensionMismatchError(DatasetException):
    """Raised when an object's dimension differs from the dataset's"""

    def __init__(self, expected: int, got: int):
        super().__init__(f"Expected object dimension {expected}, got {got}")


class UnknownLabelError(DatasetException):
    """Raised when a label is not part of the label alphabet"""

    def __init__(self, label: str):
        self.label = label
        super().__init__(f"Unknown label: {label}")
