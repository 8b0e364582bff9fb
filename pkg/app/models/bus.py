"""
Bus Models
Timetable departures and observed bus trips
"""

from bisect import bisect_left
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, model_validator


class BusTrip(BaseModel):
    """Boarding and alighting of one passenger; minutes on the scenario clock"""
    origin_stop: int
    dest_stop: int
    boarding_time: float
    arrival_time: float
    evening: int = 0

    @model_validator(mode="after")
    def _ordered(self) -> "BusTrip":
        if self.arrival_time <= self.boarding_time:
            raise ValueError("arrival must come after boarding")
        return self


class Departure(BaseModel):
    trip_id: str
    origin_stop: int
    dest_stop: int
    departure: float
    arrival: float


class Timetable:
    """Departures indexed by ordered (origin, destination) pair, sorted by time"""

    def __init__(self, departures: List[Departure]):
        self.departures = departures
        self._trips: Dict[Tuple[int, int], List[Departure]] = {}
        for dep in departures:
            self._trips.setdefault((dep.origin_stop, dep.dest_stop), []).append(dep)
        for trips in self._trips.values():
            trips.sort(key=lambda d: d.departure)
        self._times = {pair: [d.departure for d in trips] for pair, trips in self._trips.items()}

    def __len__(self) -> int:
        return len(self.departures)

    def pairs(self) -> List[Tuple[int, int]]:
        return sorted(self._trips)

    def times(self, origin: int, dest: int) -> List[float]:
        return self._times.get((origin, dest), [])

    def serves(self, origin: int, dest: int) -> bool:
        return (origin, dest) in self._trips

    def previous_departure(self, origin: int, dest: int, time: float) -> Optional[float]:
        """Latest departure strictly before `time`"""
        times = self.times(origin, dest)
        k = bisect_left(times, time - 1e-9)
        return times[k - 1] if k > 0 else None

    def next_departure(self, origin: int, dest: int, time: float) -> Optional[Departure]:
        """Earliest departure not before `time`"""
        times = self.times(origin, dest)
        k = bisect_left(times, time - 1e-9)
        return self._trips[(origin, dest)][k] if k < len(times) else None
