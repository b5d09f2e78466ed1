"""
Synthetic data generation schema
"""
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator


class GenSpec(BaseModel):
    """Parameters of a seeded synthetic dataset"""
    model_config = ConfigDict(frozen=True)

    task: Literal["classification", "regression"] = Field(default="classification")
    n: int = Field(..., ge=1, description="Number of examples")
    p: int = Field(default=30, ge=1, description="Feature dimension")
    n_classes: int = Field(default=2, ge=1, description="Number of classes (classification)")
    class_sep: float = Field(default=2.0, ge=0, description="Distance between class centers")
    noise_sd: float = Field(default=0.1, ge=0, description="Target noise standard deviation (regression)")
    seed: int = Field(default=0, ge=0, lt=2**64)

    @model_validator(mode="after")
    def validate_classes(self) -> "GenSpec":
        if self.task == "classification" and self.n_classes < 2:
            raise ValueError("classification needs at least 2 classes")
        return self
