"""
Solution Models
Subproblem instances and their solutions
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

from .graph import EventNode, Route
from .request import Request, ServiceWindow


@dataclass
class Anchor:
    """A vehicle's current position: the last event it committed to"""
    vehicle: int
    node: EventNode
    time: float


@dataclass
class MilpInstance:
    """
    Routing subproblem over the event graph. `nodes` and `arcs` hold only
    usable elements; anchored vehicles start at their anchor node, the rest
    at the depot no earlier than `clock`.
    """
    nodes: List[EventNode]
    arcs: List[Tuple[EventNode, EventNode]]
    arc_cost: List[float]
    arc_time: List[float]
    earliest: Dict[EventNode, float]
    latest: Dict[EventNode, float]
    service: Dict[EventNode, float]
    stop: Dict[EventNode, int]
    requests: Dict[int, Request]
    vehicles: int
    window: ServiceWindow
    clock: float
    omega1: float = 1.0
    omega2: float = 1.0
    omega3: float = 100.0
    anchors: List[Anchor] = field(default_factory=list)
    onboard_pickup: Dict[int, float] = field(default_factory=dict)
    fixed_accept: Set[int] = field(default_factory=set)
    fixed_deny: Set[int] = field(default_factory=set)

    @property
    def free_vehicles(self) -> int:
        return self.vehicles - len(self.anchors)

    def pickup_nodes(self, request_id: int) -> List[EventNode]:
        return [v for v in self.nodes if v.is_pickup and v.request == request_id]

    def dropoff_nodes(self, request_id: int) -> List[EventNode]:
        return [v for v in self.nodes if v.is_dropoff and v.request == request_id]


@dataclass
class SubproblemSolution:
    accepted: Set[int]
    denied: Set[int]
    routes: List[Route]
    service_start: Dict[EventNode, float]
    objective: float
    routing_cost: float
    regret: float
    optimal: bool
    bound: float = float("-inf")
    nodes_explored: int = 0
    status: str = "optimal"

    def p_star(self) -> Dict[int, int]:
        decided = {i: 1 for i in self.accepted}
        decided.update({i: 0 for i in self.denied})
        return dict(sorted(decided.items()))

    def route_of(self, request_id: int) -> Optional[Route]:
        for route in self.routes:
            if any(s.node.is_pickup and s.node.request == request_id for s in route.stops):
                return route
        return None
