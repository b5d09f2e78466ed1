"""
Nonconformity scorer configuration schema
"""
import math
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field


class MeasureKind(str, Enum):
    """Supported nonconformity measures"""
    NN = "nn"
    KNN = "knn"
    SIMPLIFIED_KNN = "simplified_knn"
    KDE = "kde"
    LSSVM = "lssvm"
    BOOTSTRAP = "bootstrap"


class Variant(str, Enum):
    """How p-values are computed"""
    STANDARD = "standard"
    OPTIMIZED = "optimized"
    ICP = "icp"


class ScorerConfig(BaseModel):
    """Hyperparameters of a nonconformity measure"""
    model_config = ConfigDict(frozen=True, use_enum_values=False)

    measure: MeasureKind = Field(default=MeasureKind.KNN, description="Measure kind")
    k: int = Field(default=15, ge=1, description="Neighbour count")
    h: float = Field(default=1.0, gt=0, description="KDE bandwidth")
    rho: float = Field(default=1.0, gt=0, description="LS-SVM regularizer")
    B: int = Field(default=10, ge=1, description="Bootstrap ensemble size")
    tree_max_depth: int = Field(default=10, ge=0, description="Maximum tree depth")
    tree_features_per_split: Optional[int] = Field(
        default=None, ge=1,
        description="Features considered per split; round(sqrt(p)) when omitted"
    )
    distance: str = Field(default="euclidean", description="Distance registry id")
    kernel: str = Field(default="gaussian", description="Kernel registry id")
    feature_map: str = Field(default="identity", description="LS-SVM feature map id")
    poly_degree: int = Field(default=2, ge=1, description="Degree of the polynomial feature map")
    seed: int = Field(default=0, ge=0, lt=2**64, description="RNG seed")

    @property
    def effective_k(self) -> int:
        """NN is k-NN with k = 1"""
        return 1 if self.measure == MeasureKind.NN else self.k

    def features_per_split(self, p: int) -> int:
        if self.tree_features_per_split is not None:
            return min(self.tree_features_per_split, p)
        return max(1, min(p, int(round(math.sqrt(p)))))
