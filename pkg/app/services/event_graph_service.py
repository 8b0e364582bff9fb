"""
Event Graph Service Module
===========================
Event-based graph over pick-up and drop-off events.

NODES:
-----
A node is (request, + or -, other requests on board). Only onboard sets that
come from solo service or from a feasible pairwise path are created, so the
graph never holds more than two requests on board at once. The depot is a
single node.

ARCS:
----
v -> w exists when the vehicle load after v equals the load before w, the
transition is time feasible (e_v + s_v + t_vw <= l_w), and w is not a
re-pick-up of the request just dropped at v. Arcs carry the routing cost and
travel time between the two events' stops.

The graph is mutated only by insert_request, remove_request and prune; each
returns the GraphDelta it applied.
"""

from collections import defaultdict
from typing import Dict, FrozenSet, Iterable, List, Set, Tuple

import networkx as nx

from ..models.graph import DEPOT_NODE, GraphDelta, EventNode, PathCandidate, PICKUP, DROPOFF
from ..models.network import StopNetwork
from ..models.request import Request, ServiceWindow
from ..utils.errors import DuplicateRequestError, UnknownRequestError
from ..utils.logger import logger

TIME_EPS = 1e-9


class EventGraph:
    """Mutable event graph for one evening"""

    def __init__(self, net: StopNetwork, capacity: int, window: ServiceWindow):
        self.net = net
        self.capacity = capacity
        self.window = window
        self.requests: Dict[int, Request] = {}
        self.graph = nx.DiGraph()
        self._by_before: Dict[FrozenSet[int], Set[EventNode]] = defaultdict(set)
        self._by_after: Dict[FrozenSet[int], Set[EventNode]] = defaultdict(set)
        self._add_node(DEPOT_NODE)

    # ==================== NODE DATA ====================

    def stop(self, node: EventNode) -> int:
        if node.is_depot:
            return self.net.depot
        req = self.requests[node.request]
        return req.pickup_stop if node.is_pickup else req.dropoff_stop

    def time_window(self, node: EventNode) -> Tuple[float, float]:
        if node.is_depot:
            return self.window.e0, self.window.l0
        req = self.requests[node.request]
        return (req.e_pick, req.l_pick) if node.is_pickup else (req.e_drop, req.l_drop)

    def service(self, node: EventNode) -> float:
        return 0.0 if node.is_depot else self.requests[node.request].service

    def load(self, onboard: Iterable[int]) -> int:
        return sum(self.requests[r].group_size for r in onboard)

    @property
    def nodes(self) -> List[EventNode]:
        return sorted(self.graph.nodes)

    @property
    def arcs(self) -> List[Tuple[EventNode, EventNode]]:
        return sorted(self.graph.edges)

    def has_arc(self, tail: EventNode, head: EventNode) -> bool:
        return self.graph.has_edge(tail, head)

    def arc_cost(self, tail: EventNode, head: EventNode) -> float:
        return self.graph.edges[tail, head]["cost"]

    def arc_time(self, tail: EventNode, head: EventNode) -> float:
        return self.graph.edges[tail, head]["time"]

    def nodes_of(self, request_id: int) -> List[EventNode]:
        return sorted(v for v in self.graph.nodes if v.references(request_id))

    # ==================== MUTATION ====================

    def insert_request(self, req: Request, paths: Iterable[PathCandidate] = ()) -> GraphDelta:
        """Add the request's solo nodes plus the nodes of each kept pairwise path"""
        if req.id in self.requests:
            raise DuplicateRequestError(f"request {req.id} is already in the event graph")
        self.requests[req.id] = req

        wanted: List[EventNode] = [EventNode(req.id, PICKUP), EventNode(req.id, DROPOFF)]
        for path in paths:
            if not path.feasible:
                continue
            for rid in (path.first, path.second):
                if rid not in self.requests:
                    raise UnknownRequestError(f"path references unknown request {rid}")
            wanted.extend(path.nodes())

        delta = GraphDelta()
        for node in wanted:
            if node in self.graph or node in delta.added_nodes:
                continue
            if self.load(node.after()) > self.capacity or self.load(node.before()) > self.capacity:
                continue
            self._add_node(node)
            delta.added_nodes.append(node)

        seen = set()
        for node in delta.added_nodes:
            for head in list(self._by_before[node.after()]):
                self._try_arc(node, head, delta, seen)
            for tail in list(self._by_after[node.before()]):
                self._try_arc(tail, node, delta, seen)
        logger.debug(
            f"Inserted request {req.id}: +{len(delta.added_nodes)} nodes, +{len(delta.added_arcs)} arcs"
        )
        return delta

    def remove_request(self, request_id: int) -> GraphDelta:
        if request_id not in self.requests:
            raise UnknownRequestError(f"request {request_id} is not in the event graph")
        doomed = [v for v in self.graph.nodes if v.references(request_id)]
        delta = self._remove_nodes(doomed)
        del self.requests[request_id]
        return delta

    def update_request(self, req: Request) -> None:
        """Replace a request's data (tightened windows); arcs are kept"""
        if req.id not in self.requests:
            raise UnknownRequestError(f"request {req.id} is not in the event graph")
        self.requests[req.id] = req

    def prune(self, sources: Iterable[EventNode] = ()) -> GraphDelta:
        """Drop nodes not on some path from the depot or a source back to the depot"""
        starts = {DEPOT_NODE, *[s for s in sources if s in self.graph]}
        reachable = set(starts)
        for s in starts:
            reachable |= nx.descendants(self.graph, s)
        coreachable = nx.ancestors(self.graph, DEPOT_NODE) | {DEPOT_NODE}
        doomed = [v for v in self.graph.nodes if v not in reachable or v not in coreachable]
        delta = self._remove_nodes(doomed)
        if doomed:
            logger.debug(f"Pruned {len(doomed)} unreachable nodes")
        return delta

    def _add_node(self, node: EventNode) -> None:
        self.graph.add_node(node)
        self._by_before[node.before()].add(node)
        self._by_after[node.after()].add(node)

    def _remove_nodes(self, nodes: List[EventNode]) -> GraphDelta:
        delta = GraphDelta()
        for node in nodes:
            if node.is_depot:
                continue
            delta.removed_arcs.extend(self.graph.in_edges(node))
            delta.removed_arcs.extend(e for e in self.graph.out_edges(node) if e[1] != node)
            self.graph.remove_node(node)
            self._by_before[node.before()].discard(node)
            self._by_after[node.after()].discard(node)
            delta.removed_nodes.append(node)
        delta.removed_arcs = sorted(set(delta.removed_arcs))
        return delta

    def _try_arc(self, tail: EventNode, head: EventNode, delta: GraphDelta, seen: set) -> None:
        if (tail, head) in seen or not self.arc_allowed(tail, head):
            return
        seen.add((tail, head))
        a, b = self.stop(tail), self.stop(head)
        self.graph.add_edge(tail, head, cost=self.net.c(a, b), time=self.net.t(a, b))
        delta.added_arcs.append((tail, head))

    def arc_allowed(self, tail: EventNode, head: EventNode) -> bool:
        if tail == head or tail.after() != head.before():
            return False
        if tail.is_dropoff and head.is_pickup and head.request == tail.request:
            return False
        e_tail, _ = self.time_window(tail)
        _, l_head = self.time_window(head)
        travel = self.net.t(self.stop(tail), self.stop(head))
        return e_tail + self.service(tail) + travel <= l_head + TIME_EPS

    # ==================== INSPECTION ====================

    def check_reachability(self, sources: Iterable[EventNode] = ()) -> List[EventNode]:
        """Nodes that are not reachable from the depot/sources or cannot return to it"""
        starts = {DEPOT_NODE, *sources}
        reachable = set(starts)
        for s in starts:
            if s in self.graph:
                reachable |= nx.descendants(self.graph, s)
        coreachable = nx.ancestors(self.graph, DEPOT_NODE) | {DEPOT_NODE}
        return sorted(v for v in self.graph.nodes if v not in reachable or v not in coreachable)

    def edge_list(self) -> List[str]:
        return [f"{u.label(self.capacity)} -> {v.label(self.capacity)}" for u, v in self.arcs]

    def dump(self) -> str:
        lines = [f"# {self.graph.number_of_nodes()} nodes, {self.graph.number_of_edges()} arcs"]
        lines += self.edge_list()
        return "\n".join(lines) + "\n"

    def snapshot(self) -> Tuple[frozenset, frozenset]:
        return frozenset(self.graph.nodes), frozenset(self.graph.edges)
