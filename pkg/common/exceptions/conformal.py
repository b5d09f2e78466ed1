"""
Conformal engine exceptions

Each exception carries a process exit code so the CLI handler can
turn it into a consistent failure without inspecting the type again.
"""
from typing import Optional


class ConformalException(Exception):
    """Base exception for conformal engine errors"""
    def __init__(self, message: str, exit_code: int = 1):
        self.message = message
        self.exit_code = exit_code
        super().__init__(self.message)


class NotIncrementalError(ConformalException):
    """Raised when observe() is called on a scorer that cannot learn incrementally"""
    def __init__(self, message: str = "Scorer is not incremental", scorer: Optional[str] = None):
        if scorer:
            message = f"{message}: {scorer}"
        super().__init__(message)


class DegenerateUpdateError(ConformalException):
    """Raised when an LS-SVM update denominator is too close to zero"""
    def __init__(self, message: str = "Degenerate update denominator", index: Optional[int] = None):
        self.index = index
        if index is not None:
            message = f"{message} at example {index}"
        super().__init__(message)


class InvalidSplitError(ConformalException):
    """Raised when an inductive split leaves an empty proper-training or calibration set"""
    def __init__(self, t: int, n: int):
        self.t = t
        self.n = n
        super().__init__(f"Invalid split t={t} for n={n}: need 1 <= t <= n-1")


class InsufficientDataError(ConformalException):
    """Raised when a dataset is too small for the requested operation"""
    def __init__(self, message: str = "Not enough training examples"):
        super().__init__(message)


class UnsupportedLabelsError(ConformalException):
    """Raised when a measure cannot handle the label alphabet (e.g. LS-SVM needs two labels)"""
    def __init__(self, message: str = "Unsupported label alphabet"):
        super().__init__(message)


class FeatureMapError(ConformalException):
    """Raised when objects do not match the feature map's input dimension"""
    def __init__(self, expected: int, got: int):
        super().__init__(f"Feature map expects dimension {expected}, got {got}")


class BootstrapSamplingError(ConformalException):
    """Raised when bootstrap sampling exceeds its draw guard"""
    def __init__(self, draws: int):
        self.draws = draws
        super().__init__(f"Bootstrap sampling did not cover every example after {draws} draws")


class UnknownMeasureError(ConformalException):
    """Raised when a measure, distance, kernel or feature map id is not registered"""
    def __init__(self, kind: str, name: str):
        super().__init__(f"Unknown {kind}: {name}", exit_code=2)
