"""
Path Heuristic Module
======================
Feasible-path heuristic: decides which pairwise paths of a newly revealed
request enter the event graph.

For a new request i and every request j already in the graph, four paths
are checked, each covering both requests' events:
    j+ i+ j- i-    j+ i+ i- j-    (j picked first)
    i+ j+ i- j-    i+ j+ j- i-    (i picked first)
Feasible paths are ranked by spatial proximity (routing cost of the three
legs) and temporal proximity (estimated regret of both drop-offs). With
rho_i feasible paths, the best max(rho_abs, ceil(rho_rel * rho_i)) are kept.
"""

import math
from dataclasses import replace
from typing import Dict, Iterable, List, Optional, Tuple, Union

from ..config import HeuristicConfig, config
from ..models.graph import DROPOFF, PICKUP, PathCandidate, PathKind
from ..models.network import StopNetwork
from ..models.request import Request
from .schedule_service import TimedEvent, schedule_service


def _stop(req: Request, kind: str) -> int:
    return req.pickup_stop if kind == PICKUP else req.dropoff_stop


def _window(req: Request, kind: str) -> Tuple[float, float]:
    return (req.e_pick, req.l_pick) if kind == PICKUP else (req.e_drop, req.l_drop)


class PathHeuristic:
    """Enumerates, scores and trims pairwise paths"""

    def __init__(self, settings: Optional[HeuristicConfig] = None):
        self.settings = settings or config.heuristic

    # ==================== FEASIBILITY ====================

    def sequence_feasible(self, events: List[Tuple[int, str]], requests: Dict[int, Request], net: StopNetwork) -> bool:
        timed = []
        for rid, kind in events:
            e, l_ = _window(requests[rid], kind)
            timed.append(TimedEvent((rid, kind), _stop(requests[rid], kind), e, l_, requests[rid].service))
        travel = [net.t(a.stop, b.stop) for a, b in zip(timed, timed[1:])]
        position = {ev.key: k for k, ev in enumerate(timed)}
        limits = [
            (position[(rid, PICKUP)], position[(rid, DROPOFF)], requests[rid].service + requests[rid].max_ride)
            for rid in requests
            if (rid, PICKUP) in position and (rid, DROPOFF) in position
        ]
        return schedule_service.is_feasible(timed, travel, limits)

    def pairwise_feasible(
        self, i: Request, j: Request, net: StopNetwork, capacity: Optional[int] = None
    ) -> Tuple[bool, bool]:
        """Feasibility of j+ i+ j- i- and j+ i+ i- j-, in that order"""
        if capacity is not None and i.group_size + j.group_size > capacity:
            return False, False
        requests = {i.id: i, j.id: j}
        cross = PathCandidate(i.id, j.id, PathKind.CROSS, new_first=False)
        nested = PathCandidate(i.id, j.id, PathKind.NESTED, new_first=False)
        return (
            self.sequence_feasible(cross.events(), requests, net),
            self.sequence_feasible(nested.events(), requests, net),
        )

    def candidate_paths(
        self, new: Request, existing: Request, net: StopNetwork, capacity: Optional[int] = None
    ) -> List[PathCandidate]:
        """All four orientations with feasibility and proximity filled in"""
        j_first = self.pairwise_feasible(new, existing, net, capacity)
        i_first = self.pairwise_feasible(existing, new, net, capacity)
        requests = {new.id: new, existing.id: existing}
        paths = []
        for new_first, flags in ((False, j_first), (True, i_first)):
            for kind, ok in zip((PathKind.CROSS, PathKind.NESTED), flags):
                path = PathCandidate(new.id, existing.id, kind, new_first, feasible=ok)
                paths.append(replace(
                    path,
                    spatial=self.spatial_proximity(path, requests, net),
                    temporal=self.temporal_proximity(path, requests, net),
                ))
        return paths

    # ==================== PROXIMITY ====================

    def spatial_proximity(
        self, path: PathCandidate, requests: Dict[int, Request], net: StopNetwork, omega1: Optional[float] = None
    ) -> float:
        """omega1 times the routing cost of the three legs; +inf if infeasible"""
        if not path.feasible:
            return math.inf
        omega1 = self.settings.omega1 if omega1 is None else omega1
        stops = [_stop(requests[rid], kind) for rid, kind in path.events()]
        return omega1 * sum(net.c(a, b) for a, b in zip(stops, stops[1:]))

    def temporal_proximity(
        self,
        path: PathCandidate,
        requests: Dict[int, Request],
        net: StopNetwork,
        omega2: Optional[float] = None,
        travel_leg: Optional[str] = None,
    ) -> float:
        """
        omega2 * (2 T - e_d1 + s_d1 + t_d1d2 - e_d2) where T is the estimated
        arrival at the first drop-off d1 and d2 is the second drop-off.
        """
        if not path.feasible:
            return math.inf
        omega2 = self.settings.omega2 if omega2 is None else omega2
        travel_leg = travel_leg or self.settings.travel_leg
        a, b = requests[path.first], requests[path.second]
        (_, _), (_, _), (d1, _), (d2, _) = path.events()
        first_drop, second_drop = requests[d1], requests[d2]

        if travel_leg == "reverse":
            leg = net.t(b.pickup_stop, a.pickup_stop)
        else:
            leg = net.t(a.pickup_stop, b.pickup_stop)
        arrival = max(b.e_pick, a.e_pick + a.service + leg) + b.service + net.t(b.pickup_stop, first_drop.dropoff_stop)
        return omega2 * (
            2.0 * arrival
            - first_drop.e_drop
            + first_drop.service
            + net.t(first_drop.dropoff_stop, second_drop.dropoff_stop)
            - second_drop.e_drop
        )

    def score(self, path: PathCandidate) -> Union[float, Tuple[float, float]]:
        if self.settings.proximity_aggregation == "lexicographic":
            return (path.spatial, path.temporal)
        return path.spatial + path.temporal

    # ==================== SELECTION ====================

    def kept_count(self, rho_i: int, settings: Optional[HeuristicConfig] = None) -> int:
        settings = settings or self.settings
        if not settings.enabled:
            return rho_i
        rho = max(settings.rho_abs, math.ceil(settings.rho_rel * rho_i))
        return min(rho, rho_i)

    def select_feasible_paths(
        self,
        new: Request,
        existing: Iterable[Request],
        net: StopNetwork,
        capacity: Optional[int] = None,
        settings: Optional[HeuristicConfig] = None,
    ) -> List[PathCandidate]:
        """Best feasible paths of `new` with the current requests, ties broken by request id then path kind"""
        if settings is not None and settings is not self.settings:
            return PathHeuristic(settings).select_feasible_paths(new, existing, net, capacity)
        feasible = []
        for other in sorted(existing, key=lambda r: r.id):
            if other.id == new.id:
                continue
            feasible.extend(p for p in self.candidate_paths(new, other, net, capacity) if p.feasible)
        keep = self.kept_count(len(feasible))
        feasible.sort(key=lambda p: (self.score(p), p.sort_key()))
        return feasible[:keep]


# Global path heuristic instance
path_heuristic = PathHeuristic()
