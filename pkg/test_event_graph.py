"""
Event Graph Tests
=================
1. Node and arc construction for small request sets
2. Insertion, removal and pruning keep the graph consistent
3. Feasible-path heuristic: kept counts, proximity measures and trimmed subgraphs

Run: pytest test_event_graph.py
"""

import math
from dataclasses import replace

import pytest

from app.config import HeuristicConfig, NetworkConfig
from app.models.graph import DEPOT_NODE, DROPOFF, PICKUP, EventNode, PathCandidate, PathKind
from app.models.request import Request
from app.services.event_graph_service import EventGraph
from app.services.network_service import NetworkService
from app.services.path_heuristic import PathHeuristic
from app.utils.errors import DuplicateRequestError, UnknownRequestError

OPEN = HeuristicConfig(enabled=False)


# pick-up/drop-off labels for three riders sharing stops 1 -> 2, capacity 3
THREE_RIDER_NODES = {
    "depot",
    "(1+,0,0)", "(1-,0,0)", "(2+,0,0)", "(2-,0,0)", "(3+,0,0)", "(3-,0,0)",
    "(1+,2,0)", "(2+,1,0)", "(1-,2,0)", "(2-,1,0)",
    "(1+,3,0)", "(3+,1,0)", "(1-,3,0)", "(3-,1,0)",
    "(2+,3,0)", "(3+,2,0)", "(2-,3,0)", "(3-,2,0)",
}

THREE_RIDER_ARCS = {
    # empty vehicle
    "depot -> (1+,0,0)", "depot -> (2+,0,0)", "depot -> (3+,0,0)",
    "(1-,0,0) -> depot", "(2-,0,0) -> depot", "(3-,0,0) -> depot",
    "(1-,0,0) -> (2+,0,0)", "(1-,0,0) -> (3+,0,0)",
    "(2-,0,0) -> (1+,0,0)", "(2-,0,0) -> (3+,0,0)",
    "(3-,0,0) -> (1+,0,0)", "(3-,0,0) -> (2+,0,0)",
    # rider 1 alone on board
    "(1+,0,0) -> (1-,0,0)", "(1+,0,0) -> (2+,1,0)", "(1+,0,0) -> (3+,1,0)",
    "(2-,1,0) -> (1-,0,0)", "(2-,1,0) -> (3+,1,0)",
    "(3-,1,0) -> (1-,0,0)", "(3-,1,0) -> (2+,1,0)",
    # rider 2 alone on board
    "(2+,0,0) -> (2-,0,0)", "(2+,0,0) -> (1+,2,0)", "(2+,0,0) -> (3+,2,0)",
    "(1-,2,0) -> (2-,0,0)", "(1-,2,0) -> (3+,2,0)",
    "(3-,2,0) -> (2-,0,0)", "(3-,2,0) -> (1+,2,0)",
    # rider 3 alone on board
    "(3+,0,0) -> (3-,0,0)", "(3+,0,0) -> (1+,3,0)", "(3+,0,0) -> (2+,3,0)",
    "(1-,3,0) -> (3-,0,0)", "(1-,3,0) -> (2+,3,0)",
    "(2-,3,0) -> (3-,0,0)", "(2-,3,0) -> (1+,3,0)",
    # two riders on board
    "(1+,2,0) -> (1-,2,0)", "(1+,2,0) -> (2-,1,0)", "(2+,1,0) -> (1-,2,0)", "(2+,1,0) -> (2-,1,0)",
    "(1+,3,0) -> (1-,3,0)", "(1+,3,0) -> (3-,1,0)", "(3+,1,0) -> (1-,3,0)", "(3+,1,0) -> (3-,1,0)",
    "(2+,3,0) -> (2-,3,0)", "(2+,3,0) -> (3-,2,0)", "(3+,2,0) -> (2-,3,0)", "(3+,2,0) -> (3-,2,0)",
}


def build_graph(requests, net, window, capacity=3, settings=OPEN):
    heuristic = PathHeuristic(settings)
    graph = EventGraph(net, capacity, window)
    for req in requests:
        paths = heuristic.select_feasible_paths(req, graph.requests.values(), net, capacity)
        graph.insert_request(req, paths)
    return graph


@pytest.fixture
def three_riders(line_network, make_request):
    return [make_request(rid, 1, 2, 60.0, line_network, lead=30.0) for rid in (1, 2, 3)]


# ==================== CONSTRUCTION ====================

def test_three_identical_requests(three_riders, line_network, window):
    graph = build_graph(three_riders, line_network, window)
    # depot, two solo events per request, four shared events per pair
    assert len(graph.nodes) == 1 + 3 * 2 + 3 * 4
    assert EventNode(2, PICKUP, (1,)) in graph.nodes
    assert EventNode(1, DROPOFF, (2,)) in graph.nodes
    # no node ever carries three requests
    assert all(len(v.others) <= 1 for v in graph.nodes)

    assert graph.has_arc(DEPOT_NODE, EventNode(1, PICKUP))
    assert graph.has_arc(EventNode(1, PICKUP), EventNode(2, PICKUP, (1,)))
    assert graph.has_arc(EventNode(2, PICKUP, (1,)), EventNode(1, DROPOFF, (2,)))
    assert graph.has_arc(EventNode(3, DROPOFF), DEPOT_NODE)
    assert not graph.has_arc(DEPOT_NODE, EventNode(1, DROPOFF))
    assert not graph.has_arc(EventNode(1, DROPOFF), EventNode(1, PICKUP))
    assert graph.check_reachability() == []


def test_three_riders_give_the_exact_node_and_arc_sets(three_riders, line_network, window):
    graph = build_graph(three_riders, line_network, window)
    assert {v.label(3) for v in graph.nodes} == THREE_RIDER_NODES
    edges = graph.edge_list()
    assert len(edges) == len(THREE_RIDER_ARCS) == 45
    assert set(edges) == THREE_RIDER_ARCS
    # a rider dropped off is never picked up again
    assert "(2-,1,0) -> (2+,1,0)" not in edges
    # two seats already hold every pair
    assert build_graph(three_riders, line_network, window, capacity=2).snapshot() == graph.snapshot()


def test_arc_costs_follow_the_network(three_riders, line_network, window):
    graph = build_graph(three_riders[:1], line_network, window)
    tail, head = EventNode(1, PICKUP), EventNode(1, DROPOFF)
    assert graph.arc_cost(tail, head) == pytest.approx(line_network.c(1, 2))
    assert graph.arc_time(tail, head) == pytest.approx(line_network.t(1, 2))
    assert graph.arc_cost(DEPOT_NODE, tail) == pytest.approx(line_network.c(0, 1))


def test_arcs_respect_time_windows(line_network, make_request, window):
    early = make_request(1, 1, 2, 10.0, line_network, lead=10.0)
    late = make_request(2, 2, 1, 200.0, line_network, lead=10.0)
    graph = build_graph([early, late], line_network, window)
    assert graph.has_arc(EventNode(1, DROPOFF), EventNode(2, PICKUP))
    # the late rider cannot be followed by the early one
    assert not graph.has_arc(EventNode(2, DROPOFF), EventNode(1, PICKUP))
    # no shared nodes for requests hours apart
    assert len(graph.nodes) == 5


def test_groups_above_capacity_share_no_node(line_network, make_request, window):
    big = make_request(1, 1, 2, 60.0, line_network, group_size=4, lead=30.0)
    other = make_request(2, 1, 2, 60.0, line_network, group_size=3, lead=30.0)
    graph = EventGraph(line_network, 6, window)
    graph.insert_request(big)
    # capacity-blind candidates are still filtered by the graph
    paths = PathHeuristic(OPEN).candidate_paths(other, big, line_network)
    assert any(p.feasible for p in paths)
    graph.insert_request(other, paths)
    assert len(graph.nodes) == 5
    assert all(not p.feasible for p in PathHeuristic(OPEN).candidate_paths(other, big, line_network, capacity=6))


# ==================== MUTATION ====================

def test_removal_matches_building_without_the_request(three_riders, line_network, window):
    full = build_graph(three_riders, line_network, window)
    full.remove_request(3)
    assert full.snapshot() == build_graph(three_riders[:2], line_network, window).snapshot()
    assert all(not v.references(3) for v in full.nodes)


def test_insert_then_remove_restores_the_graph(three_riders, line_network, window):
    graph = build_graph(three_riders[:2], line_network, window)
    before = graph.snapshot()
    paths = PathHeuristic(OPEN).select_feasible_paths(three_riders[2], graph.requests.values(), line_network, 3)
    delta = graph.insert_request(three_riders[2], paths)
    assert delta.added_nodes and delta.added_arcs
    graph.remove_request(3)
    assert graph.snapshot() == before


def test_mutation_errors(three_riders, line_network, window):
    graph = build_graph(three_riders[:1], line_network, window)
    with pytest.raises(DuplicateRequestError):
        graph.insert_request(three_riders[0])
    with pytest.raises(UnknownRequestError):
        graph.remove_request(42)
    with pytest.raises(UnknownRequestError):
        graph.update_request(three_riders[1])
    stray = PathCandidate(2, 9, PathKind.CROSS, new_first=True)
    with pytest.raises(UnknownRequestError):
        graph.insert_request(three_riders[1], [stray])


def test_prune_drops_requests_that_cannot_be_served(line_network, make_request, window):
    graph = build_graph([make_request(1, 1, 2, 60.0, line_network, lead=30.0)], line_network, window)
    graph.graph.remove_edge(EventNode(1, PICKUP), EventNode(1, DROPOFF))
    delta = graph.prune()
    assert set(delta.removed_nodes) == {EventNode(1, PICKUP), EventNode(1, DROPOFF)}
    assert graph.nodes == [DEPOT_NODE]


# ==================== HEURISTIC ====================

def test_kept_count():
    heuristic = PathHeuristic(HeuristicConfig(rho_abs=10, rho_rel=0.25))
    assert heuristic.kept_count(100) == 25
    assert heuristic.kept_count(8) == 8
    assert heuristic.kept_count(0) == 0
    assert heuristic.kept_count(37) == 10
    assert heuristic.kept_count(100, OPEN) == 100


def plain_request(rid: int, pickup: int, dropoff: int) -> Request:
    """Zero windows and zero service time"""
    return Request(id=rid, pickup_stop=pickup, dropoff_stop=dropoff, group_size=1, reveal_time=0.0,
                   e_pick=0.0, l_pick=10.0, e_drop=0.0, l_drop=20.0, service=0.0, max_ride=10.0, t_direct=1.0)


def test_spatial_proximity_sums_the_three_legs():
    net = NetworkService(NetworkConfig()).from_coordinates(
        {1: (0.0, 0.0), 2: (1.0, 0.0), 3: (2.0, 0.0), 4: (3.0, 0.0)}, detour=1.0
    )
    requests = {1: plain_request(1, 1, 3), 2: plain_request(2, 2, 4)}
    path = PathCandidate(2, 1, PathKind.CROSS, new_first=False)
    heuristic = PathHeuristic(HeuristicConfig())
    assert heuristic.spatial_proximity(path, requests, net) == pytest.approx(3.0)
    assert heuristic.spatial_proximity(path, requests, net, omega1=2.0) == pytest.approx(6.0)


def test_temporal_proximity(unit_time_network):
    requests = {1: plain_request(1, 1, 3), 2: plain_request(2, 2, 4)}
    path = PathCandidate(2, 1, PathKind.CROSS, new_first=False)
    heuristic = PathHeuristic(HeuristicConfig())
    assert heuristic.temporal_proximity(path, requests, unit_time_network) == pytest.approx(5.0)

    blocked = replace(path, feasible=False)
    assert heuristic.temporal_proximity(blocked, requests, unit_time_network) == math.inf
    assert heuristic.spatial_proximity(blocked, requests, unit_time_network) == math.inf


def test_selection_keeps_the_best_scores(three_riders, line_network):
    tight = PathHeuristic(HeuristicConfig(rho_abs=1, rho_rel=0.1))
    new, existing = three_riders[2], three_riders[:2]
    everything = PathHeuristic(OPEN).select_feasible_paths(new, existing, line_network, 3)
    kept = tight.select_feasible_paths(new, existing, line_network, 3)
    assert len(everything) == 8
    assert len(kept) == 1
    assert tight.score(kept[0]) == min(tight.score(p) for p in everything)
    assert all(p.new_request == 3 for p in everything)


@pytest.fixture
def busy_evening(line_network, make_request):
    """Six requests within twenty minutes on the line, so most pairs can share"""
    trips = [(1, 3), (2, 4), (1, 4), (3, 1), (4, 2), (2, 3)]
    return [
        make_request(rid, pickup, dropoff, 60.0 + 4.0 * rid, line_network, lead=30.0)
        for rid, (pickup, dropoff) in enumerate(trips, start=1)
    ]


@pytest.mark.parametrize("rho_abs", [1, 2, 4])
def test_trimmed_graph_is_a_subgraph_of_the_full_graph(busy_evening, line_network, window, rho_abs):
    full_nodes, full_arcs = build_graph(busy_evening, line_network, window, capacity=6).snapshot()
    trimmed = build_graph(busy_evening, line_network, window, capacity=6,
                          settings=HeuristicConfig(rho_abs=rho_abs, rho_rel=0.1))
    nodes, arcs = trimmed.snapshot()
    assert nodes <= full_nodes
    assert arcs <= full_arcs
    assert set(trimmed.requests) == set(range(1, 7))


def test_graph_grows_with_rho_abs(busy_evening, line_network, window):
    sizes = []
    for rho_abs in (1, 2, 4, 8, 16):
        nodes, arcs = build_graph(busy_evening, line_network, window, capacity=6,
                                  settings=HeuristicConfig(rho_abs=rho_abs, rho_rel=0.1)).snapshot()
        sizes.append((len(nodes), len(arcs)))
    nodes, arcs = zip(*sizes)
    assert list(nodes) == sorted(nodes)
    assert list(arcs) == sorted(arcs)
    assert sizes[0] < sizes[-1]
