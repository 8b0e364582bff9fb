"""
Regression Models
Fitted GLM coefficients and fit diagnostics
"""

from typing import List

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from ..utils.constants import N_COVARIATES


class FitReport(BaseModel):
    log_likelihood: float
    iterations: int
    converged: bool
    gradient_norm: float
    penalized: bool = False
    history: List[float] = Field(default_factory=list, exclude=True)


class PoissonModel(BaseModel):
    """log(lambda) = beta . x"""
    stop_id: int
    beta: List[float]

    @field_validator("beta")
    @classmethod
    def _finite(cls, beta: List[float]) -> List[float]:
        if not np.all(np.isfinite(beta)):
            raise ValueError("beta must be finite")
        return beta

    def coefficients(self) -> np.ndarray:
        return np.asarray(self.beta, dtype=float)


class DestinationModel(BaseModel):
    """Multinomial logit; categories[0] is the reference destination with activation 0"""
    stop_id: int
    categories: List[int] = Field(min_length=1)
    theta: List[List[float]] = []

    @model_validator(mode="after")
    def _shape(self) -> "DestinationModel":
        if len(self.theta) != len(self.categories) - 1:
            raise ValueError("theta needs one row per non-reference category")
        width = {len(row) for row in self.theta}
        if len(width) > 1:
            raise ValueError("theta rows differ in length")
        return self

    def coefficients(self, q: int = N_COVARIATES) -> np.ndarray:
        if not self.theta:
            return np.zeros((0, q))
        return np.asarray(self.theta, dtype=float)


class StopModels(BaseModel):
    """Everything fitted for one stop"""
    stop_id: int
    poisson: PoissonModel
    destination: DestinationModel
    poisson_report: FitReport
    destination_report: FitReport
