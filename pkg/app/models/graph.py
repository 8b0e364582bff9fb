"""
Event Graph Models
Nodes are (request, pick-up or drop-off, other users on board)
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, List, NamedTuple, Optional, Tuple

PICKUP = "+"
DROPOFF = "-"
DEPOT_KIND = "0"


class EventNode(NamedTuple):
    """
    `others` lists the requests on board besides `request` right after a
    pick-up, or right after a drop-off, sorted by id.
    """
    request: int
    kind: str
    others: Tuple[int, ...] = ()

    @property
    def is_depot(self) -> bool:
        return self.kind == DEPOT_KIND

    @property
    def is_pickup(self) -> bool:
        return self.kind == PICKUP

    @property
    def is_dropoff(self) -> bool:
        return self.kind == DROPOFF

    def after(self) -> FrozenSet[int]:
        """Requests on board when the vehicle leaves this event"""
        if self.kind == PICKUP:
            return frozenset(self.others) | {self.request}
        return frozenset(self.others)

    def before(self) -> FrozenSet[int]:
        """Requests on board when the vehicle reaches this event"""
        if self.kind == DROPOFF:
            return frozenset(self.others) | {self.request}
        return frozenset(self.others)

    def references(self, request_id: int) -> bool:
        return self.request == request_id or request_id in self.others

    def label(self, capacity: int = 0) -> str:
        if self.is_depot:
            return "depot"
        rest = [str(o) for o in self.others]
        rest += ["0"] * max(0, capacity - 1 - len(rest))
        return "(" + ",".join([f"{self.request}{self.kind}", *rest]) + ")"


DEPOT_NODE = EventNode(0, DEPOT_KIND, ())


class EventArc(NamedTuple):
    tail: EventNode
    head: EventNode
    cost: float
    time: float


class PathKind(str, Enum):
    """Order of the four events of two requests a (picked first) and b"""
    CROSS = "a+b+a-b-"
    NESTED = "a+b+b-a-"


@dataclass(frozen=True)
class PathCandidate:
    """
    A pairwise path between the new request and an existing one.
    `first` is picked up first; `new_first` tells whether that is the new request.
    """
    new_request: int
    existing_request: int
    kind: PathKind
    new_first: bool
    feasible: bool = True
    spatial: float = 0.0
    temporal: float = 0.0

    @property
    def first(self) -> int:
        return self.new_request if self.new_first else self.existing_request

    @property
    def second(self) -> int:
        return self.existing_request if self.new_first else self.new_request

    def events(self) -> List[Tuple[int, str]]:
        a, b = self.first, self.second
        if self.kind is PathKind.CROSS:
            return [(a, PICKUP), (b, PICKUP), (a, DROPOFF), (b, DROPOFF)]
        return [(a, PICKUP), (b, PICKUP), (b, DROPOFF), (a, DROPOFF)]

    def nodes(self) -> List[EventNode]:
        onboard: set = set()
        nodes = []
        for rid, kind in self.events():
            if kind == PICKUP:
                nodes.append(EventNode(rid, PICKUP, tuple(sorted(onboard))))
                onboard.add(rid)
            else:
                onboard.discard(rid)
                nodes.append(EventNode(rid, DROPOFF, tuple(sorted(onboard))))
        return nodes

    def sort_key(self) -> Tuple:
        return (self.existing_request, not self.new_first, self.kind.value)


@dataclass
class GraphDelta:
    added_nodes: List[EventNode] = field(default_factory=list)
    removed_nodes: List[EventNode] = field(default_factory=list)
    added_arcs: List[Tuple[EventNode, EventNode]] = field(default_factory=list)
    removed_arcs: List[Tuple[EventNode, EventNode]] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not (self.added_nodes or self.removed_nodes or self.added_arcs or self.removed_arcs)


@dataclass(frozen=True)
class ScheduledStop:
    node: EventNode
    stop: int
    time: float


@dataclass
class Route:
    vehicle: int
    stops: List[ScheduledStop] = field(default_factory=list)
    start: Optional[EventNode] = None

    def nodes(self) -> List[EventNode]:
        return [s.node for s in self.stops]
