"""
Network Models
Stops with planar coordinates plus cost and travel-time matrices
"""

from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from ..utils.constants import DEPOT


@dataclass(frozen=True)
class StopNetwork:
    """
    Complete directed graph over stops. Costs are kilometres, times minutes.
    `stop_ids[k]` labels row/column k of the matrices; the depot is stop 0.
    """
    stop_ids: Tuple[int, ...]
    coords: np.ndarray
    cost: np.ndarray
    time: np.ndarray
    depot: int = DEPOT
    index: Dict[int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.stop_ids)
        if self.cost.shape != (n, n) or self.time.shape != (n, n) or self.coords.shape != (n, 2):
            raise ValueError("matrix shapes do not match the stop list")
        object.__setattr__(self, "index", {s: k for k, s in enumerate(self.stop_ids)})
        if self.depot not in self.index:
            raise ValueError(f"depot stop {self.depot} missing from network")

    @property
    def stops(self) -> Tuple[int, ...]:
        """All stops except the depot"""
        return tuple(s for s in self.stop_ids if s != self.depot)

    def c(self, a: int, b: int) -> float:
        return float(self.cost[self.index[a], self.index[b]])

    def t(self, a: int, b: int) -> float:
        return float(self.time[self.index[a], self.index[b]])

    def position(self, stop: int) -> Tuple[float, float]:
        x, y = self.coords[self.index[stop]]
        return float(x), float(y)
