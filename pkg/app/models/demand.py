"""
Demand Models
Group sizes, scenario configuration and raw ride requests
"""

from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..utils.constants import GROUP_SIZE_PROBS, SECONDS_PER_DAY


class GroupSizeDistribution(BaseModel):
    """probs[k] is the probability of a group of k + 1 passengers"""
    model_config = ConfigDict(frozen=True)

    probs: List[float] = list(GROUP_SIZE_PROBS)

    @field_validator("probs")
    @classmethod
    def _simplex(cls, probs: List[float]) -> List[float]:
        if not probs or len(probs) > 6:
            raise ValueError("group sizes must cover 1..k with k <= 6")
        if any(p < 0 for p in probs):
            raise ValueError("probabilities must be nonnegative")
        if abs(sum(probs) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {sum(probs)!r}, not 1")
        return probs

    @property
    def sizes(self) -> np.ndarray:
        return np.arange(1, len(self.probs) + 1)

    @property
    def mean(self) -> float:
        return float(np.dot(self.sizes, self.probs))

    @property
    def max_size(self) -> int:
        nonzero = [k + 1 for k, p in enumerate(self.probs) if p > 0]
        return max(nonzero)


class ScenarioConfig(BaseModel):
    """One simulated week of evenings"""
    stops: List[int]
    service_hours: List[int] = [22, 23, 0, 1, 2, 3]
    holidays: List[bool] = [False] * 7
    seed: int = 0
    week: int = 0
    intensity_scale: float = Field(default=1.0, ge=0.0)
    delta_s: int = 45
    capacity: int = 6
    destination_resamples: int = 100

    @field_validator("service_hours")
    @classmethod
    def _hours(cls, hours: List[int]) -> List[int]:
        if not hours:
            raise ValueError("hour range must be nonempty")
        if any(h < 0 or h > 23 for h in hours):
            raise ValueError("hours must be in 0..23")
        return hours

    @field_validator("holidays")
    @classmethod
    def _week(cls, flags: List[bool]) -> List[bool]:
        if len(flags) != 7:
            raise ValueError("one holiday flag per day")
        return flags


class RequestRecord(BaseModel):
    """A sampled ride request; times in seconds from 22:00 of the first evening"""
    model_config = ConfigDict(frozen=True)

    request_id: int
    submission_time_s: int
    pickup_stop: int
    dropoff_stop: int
    group_size: int = Field(ge=1, le=6)
    earliest_pickup_s: int

    @model_validator(mode="after")
    def _distinct_stops(self) -> "RequestRecord":
        if self.pickup_stop == self.dropoff_stop:
            raise ValueError("pickup and dropoff stop must differ")
        return self

    @property
    def evening(self) -> int:
        return self.earliest_pickup_s // SECONDS_PER_DAY
