"""
Validator Service Module
=========================
Checks finished routes against the request data by walking every route
forward from the depot. Shares no code with the solver: a route passes only
if the recorded start times themselves respect travel times, windows,
capacity, ride-time limits and promised pick-up times.

Every problem becomes one Violation; an empty list means the evening is
feasible.
"""

from typing import Dict, Iterable, List, Optional, Sequence

from ..models.graph import Route
from ..models.network import StopNetwork
from ..models.report import ValidationParams, Violation
from ..models.request import Request
from ..utils.constants import EventType
from ..utils.logger import logger


class ValidatorService:
    """Forward feasibility check of route traces"""

    def validate_routes(
        self,
        routes: Iterable[Route],
        requests: Sequence[Request],
        net: StopNetwork,
        params: Optional[ValidationParams] = None,
        accepted: Optional[Iterable[int]] = None,
    ) -> List[Violation]:
        params = params or ValidationParams()
        by_id = {r.id: r for r in requests}
        picked: Dict[int, int] = {}
        dropped: Dict[int, int] = {}
        found: List[Violation] = []

        def flag(kind: str, message: str, request: Optional[int] = None, vehicle: Optional[int] = None):
            found.append(Violation(kind=kind, message=message, request=request, vehicle=vehicle))

        tol = params.tol
        for route in routes:
            v = route.vehicle
            position, ready = net.depot, params.e0
            onboard: Dict[int, float] = {}
            load = 0
            returned = False
            for stop in route.stops:
                node, time = stop.node, stop.time
                if returned:
                    flag("depot", f"stop after the return to the depot at {time:.2f}", vehicle=v)
                if time < ready + net.t(position, stop.stop) - tol:
                    flag("travel", f"reaches stop {stop.stop} at {time:.2f}, too early to come from {position}",
                         request=None if node.is_depot else node.request, vehicle=v)

                if node.is_depot:
                    if stop.stop != net.depot:
                        flag("depot", f"depot event at stop {stop.stop}", vehicle=v)
                    returned = True
                    position, ready = stop.stop, time
                    continue

                rid = node.request
                req = by_id.get(rid)
                if req is None:
                    flag("unknown", f"route serves unknown request {rid}", request=rid, vehicle=v)
                    position, ready = stop.stop, time
                    continue

                if node.is_pickup:
                    if rid in picked:
                        flag("single_service", "picked up twice", request=rid, vehicle=v)
                    picked[rid] = v
                    if stop.stop != req.pickup_stop:
                        flag("stop", f"picked up at stop {stop.stop}, expected {req.pickup_stop}", rid, v)
                    if time < req.e_pick - tol or time > req.l_pick + tol:
                        flag("window", f"pick-up at {time:.2f} outside [{req.e_pick:.2f}, {req.l_pick:.2f}]", rid, v)
                    promised = params.promised.get(rid)
                    if promised is not None and time > promised + params.max_postpone + tol:
                        flag("postpone", f"pick-up at {time:.2f} postponed beyond {promised:.2f} + "
                             f"{params.max_postpone:g}", rid, v)
                    onboard[rid] = time
                    load += req.group_size
                    if load > params.capacity:
                        flag("capacity", f"load {load} exceeds capacity {params.capacity}", rid, v)
                else:
                    if rid in dropped:
                        flag("single_service", "dropped off twice", request=rid, vehicle=v)
                    dropped[rid] = v
                    if stop.stop != req.dropoff_stop:
                        flag("stop", f"dropped off at stop {stop.stop}, expected {req.dropoff_stop}", rid, v)
                    if time < req.e_drop - tol or time > req.l_drop + tol:
                        flag("window", f"drop-off at {time:.2f} outside [{req.e_drop:.2f}, {req.l_drop:.2f}]", rid, v)
                    if rid not in onboard:
                        flag("precedence", "dropped off without a prior pick-up on this vehicle", rid, v)
                    else:
                        ride = time - (onboard.pop(rid) + req.service)
                        if ride > req.max_ride + tol:
                            flag("ride", f"ride of {ride:.2f} exceeds {req.max_ride:.2f}", rid, v)
                        load -= req.group_size
                position, ready = stop.stop, time + req.service

            if onboard:
                for rid in sorted(onboard):
                    flag("precedence", "still on board at the end of the route", rid, v)
            back = ready + net.t(position, net.depot) if not returned else ready
            if back > params.l0 + tol:
                flag("depot", f"returns to the depot at {back:.2f}, after {params.l0:g}", vehicle=v)

        served = set(picked) & set(dropped)
        if accepted is not None:
            accepted = set(accepted)
            for rid in sorted(accepted - served):
                flag("single_service", "accepted but never served", request=rid)
            for rid in sorted(served - accepted):
                flag("single_service", "served without being accepted", request=rid)
        for rid in sorted(picked.keys() ^ dropped.keys()):
            flag("precedence", "served only halfway", request=rid)
        for rid in sorted(served):
            if picked[rid] != dropped[rid]:
                flag("precedence", "picked up and dropped off by different vehicles", request=rid)

        if found:
            logger.warning(f"Route validation found {len(found)} violations")
        return found

    @staticmethod
    def promised_from_events(records: Iterable[dict]) -> Dict[int, float]:
        """First communicated pick-up time of every request in an event log"""
        promised: Dict[int, float] = {}
        for rec in records:
            if rec.get("type") == EventType.COMMUNICATE:
                promised.setdefault(rec["request"], rec["promised"])
        return promised


# Global validator service instance
validator_service = ValidatorService()
