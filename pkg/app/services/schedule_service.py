"""
Schedule Service Module
Exact timing of an event sequence as a simple temporal network

Each constraint x_v - x_u <= w becomes an arc u -> v of weight w on the
distance graph; the sequence is feasible iff the graph has no negative
cycle. With an extra origin node z pinned at 0, -dist(k, z) is the
earliest feasible start of event k. Earliest starts minimize every start
time at once, hence also the summed drop-off regret.
"""

from dataclasses import dataclass
from typing import Any, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse.csgraph import NegativeCycleError, csgraph_from_dense, floyd_warshall

# Slack per arc so that rounding noise does not register as a negative cycle
SLACK = 1e-9


@dataclass(frozen=True)
class TimedEvent:
    key: Any
    stop: int
    earliest: float
    latest: float
    service: float = 0.0


class ScheduleService:
    """Feasibility and earliest start times of event sequences"""

    def earliest_schedule(
        self,
        events: Sequence[TimedEvent],
        travel: Sequence[float],
        ride_limits: Sequence[Tuple[int, int, float]] = (),
        ready: float = float("-inf"),
    ) -> Optional[np.ndarray]:
        """
        Args:
            events: visited in order
            travel: travel[k] is the driving time from events[k] to events[k + 1]
            ride_limits: (pick index, drop index, bound) with x_drop - x_pick <= bound
            ready: lower bound on the first start time

        Returns:
            earliest start times, or None if no schedule exists
        """
        n = len(events)
        if n == 0:
            return np.zeros(0)
        if len(travel) != n - 1:
            raise ValueError("need one travel time between consecutive events")

        z = n
        weights = np.full((n + 1, n + 1), np.inf)

        def constrain(u: int, v: int, w: float) -> None:
            weights[u, v] = min(weights[u, v], w + SLACK)

        for k, ev in enumerate(events):
            earliest = max(ev.earliest, ready) if k == 0 else ev.earliest
            if earliest > ev.latest + SLACK:
                return None
            constrain(z, k, ev.latest)
            constrain(k, z, -earliest)
        for k in range(n - 1):
            constrain(k + 1, k, -(events[k].service + travel[k]))
        for pick, drop, bound in ride_limits:
            constrain(pick, drop, bound)

        graph = csgraph_from_dense(weights, null_value=np.inf)
        try:
            dist = floyd_warshall(graph, directed=True)
        except NegativeCycleError:
            return None
        if np.any(np.diag(dist) < -1e-7):
            return None

        times = -dist[:n, z]
        lower = np.array([ev.earliest for ev in events])
        return np.maximum(times, lower)

    def is_feasible(self, events, travel, ride_limits=(), ready: float = float("-inf")) -> bool:
        return self.earliest_schedule(events, travel, ride_limits, ready) is not None


# Global schedule service instance
schedule_service = ScheduleService()
