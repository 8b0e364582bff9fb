"""
Calendar Models
Calendar context and its dummy covariate encoding
"""

from enum import IntEnum
from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..utils.constants import N_COVARIATES


class Weekday(IntEnum):
    MON = 0
    TUE = 1
    WED = 2
    THU = 3
    FRI = 4
    SAT = 5
    SUN = 6

    @classmethod
    def parse(cls, value) -> "Weekday":
        """Accept 0..6, 'Mon', 'monday', 'MON'"""
        if isinstance(value, (int, np.integer)):
            return cls(int(value))
        text = str(value).strip().lower()
        if text.isdigit():
            return cls(int(text))
        for day in cls:
            if text[:3] == day.name.lower():
                return day
        raise ValueError(f"unknown weekday {value!r}")


class CalendarContext(BaseModel):
    model_config = ConfigDict(frozen=True)

    weekday: Weekday
    hour: int = Field(ge=0, le=23)
    holiday: bool = False


class CovariateVector(BaseModel):
    """Intercept plus weekday, hour and holiday dummies"""
    model_config = ConfigDict(frozen=True)

    values: List[float]

    @field_validator("values")
    @classmethod
    def _check_layout(cls, values: List[float]) -> List[float]:
        if len(values) != N_COVARIATES:
            raise ValueError(f"covariate vector must have {N_COVARIATES} entries, got {len(values)}")
        if values[0] != 1.0:
            raise ValueError("intercept entry must be 1")
        if any(v not in (0.0, 1.0) for v in values[1:]):
            raise ValueError("dummy entries must be 0 or 1")
        return values

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)
