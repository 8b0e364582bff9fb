"""
Request Models
Time-windowed ride requests in solver minutes
"""

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ServiceWindow(BaseModel):
    model_config = ConfigDict(frozen=True)

    e0: float = 0.0
    l0: float = 480.0

    @model_validator(mode="after")
    def _ordered(self) -> "ServiceWindow":
        if self.e0 > self.l0:
            raise ValueError("service window start after its end")
        return self


class Request(BaseModel):
    """
    Pick-up window [e_pick, l_pick] and drop-off window [e_drop, l_drop],
    both in minutes on the scenario clock.
    """
    model_config = ConfigDict(frozen=True)

    id: int = Field(ge=1)
    pickup_stop: int
    dropoff_stop: int
    group_size: int = Field(ge=1)
    reveal_time: float
    e_pick: float
    l_pick: float
    e_drop: float
    l_drop: float
    service: float = Field(ge=0.0)
    max_ride: float = Field(ge=0.0)
    t_direct: float = Field(ge=0.0)

    @model_validator(mode="after")
    def _windows(self) -> "Request":
        if self.e_pick > self.l_pick or self.e_drop > self.l_drop:
            raise ValueError(f"request {self.id}: empty time window")
        return self

    def tighten_pickup(self, earliest: float = None, latest: float = None) -> "Request":
        """Copy with a narrowed pick-up window"""
        e = self.e_pick if earliest is None else max(self.e_pick, earliest)
        l_ = self.l_pick if latest is None else min(self.l_pick, latest)
        return self.model_copy(update={"e_pick": e, "l_pick": max(e, l_)})
