"""
Rolling Horizon Tests
=====================
1. Single requests, forced denials and requests finished before the next reveal
2. Static streams match the one-shot solve; denials follow the fleet scenarios
3. Random evenings pass the route validator
4. Event log replay reproduces the trace-based report
5. Decision times and accepted sets agree with the log

Run: pytest test_horizon.py
"""

import numpy as np
import pytest

from app.config import HeuristicConfig, NetworkConfig, SolverConfig
from app.models.demand import RequestRecord
from app.models.horizon import RunConfig
from app.models.report import ValidationParams
from app.services.event_graph_service import EventGraph
from app.services.fleet_service import fleet_service
from app.services.horizon_service import RollingHorizonService
from app.services.metrics_service import metrics_service
from app.services.network_service import NetworkService
from app.services.path_heuristic import PathHeuristic
from app.services.subproblem_solver import SubproblemSolver
from app.services.validator_service import validator_service
from app.utils.constants import Decision, EventType
from app.utils.errors import DuplicateRequestError


@pytest.fixture
def horizon():
    return RollingHorizonService()


def random_requests(net, n, seed, request_service):
    """n requests between distinct stops with earliest pick-ups in the first two hours"""
    rng = np.random.default_rng(seed)
    stops = list(net.stops)
    times = np.sort(rng.uniform(20.0, 120.0, size=n))
    records = []
    for rid, e_pick in enumerate(times, start=1):
        pickup, dropoff = rng.choice(stops, size=2, replace=False)
        seconds = int(round(e_pick * 60))
        records.append(RequestRecord(
            request_id=rid,
            submission_time_s=seconds - 45,
            pickup_stop=int(pickup),
            dropoff_stop=int(dropoff),
            group_size=int(rng.choice([1, 1, 1, 2, 3])),
            earliest_pickup_s=seconds,
        ))
    return request_service.derive_all(records, net)


def violations_of(result, requests, net, run_cfg):
    records = [e.to_dict() for e in result.events]
    params = ValidationParams(
        capacity=run_cfg.capacity,
        max_postpone=run_cfg.max_postpone,
        promised=validator_service.promised_from_events(records),
    )
    return validator_service.validate_routes(
        result.solution.routes, requests, net, params, accepted=result.solution.accepted
    )


def random_evening(horizon, request_service, window, seed, n, time_limit_s=20.0, node_limit=0):
    """n requests on an 8-stop network with one to three vehicles"""
    rng = np.random.default_rng(500 + seed)
    net = NetworkService(NetworkConfig()).build_synthetic_network(n_stops=8, extent_km=5.0, seed=seed)
    requests = random_requests(net, n, seed, request_service)
    run_cfg = RunConfig(
        vehicles=int(rng.integers(1, 4)),
        heuristic=HeuristicConfig(rho_abs=4),
        time_limit_s=time_limit_s,
        node_limit=node_limit,
    )
    return net, requests, run_cfg, horizon.run(requests, run_cfg, net, window)


@pytest.fixture(params=[3, 11])
def random_run(request, horizon, request_service, window):
    net = NetworkService(NetworkConfig()).build_synthetic_network(n_stops=6, extent_km=4.0, seed=request.param)
    requests = random_requests(net, 10, request.param, request_service)
    run_cfg = RunConfig(vehicles=2, heuristic=HeuristicConfig(rho_abs=4), time_limit_s=20.0)
    return net, requests, run_cfg, horizon.run(requests, run_cfg, net, window)


# ==================== SMALL CASES ====================

def test_single_request_is_picked_up_on_time(horizon, line_network, make_request, window):
    req = make_request(1, 1, 2, 60.0, line_network, lead=30.0)
    result = horizon.run([req], RunConfig(vehicles=1), line_network, window)
    sol = result.solution
    assert sol.accepted == {1} and sol.denied == set()
    assert result.solves == 1
    times = {s.node.kind: s.time for s in sol.routes[0].stops}
    assert times["+"] == pytest.approx(60.0)
    assert times["-"] == pytest.approx(req.e_drop)
    assert sol.routes[0].stops[-1].node.is_depot
    report = metrics_service.report_from_solution(sol, [req], line_network)
    assert report.avg_wait == pytest.approx(0.0, abs=1e-9)
    assert report.pct_denied == 0.0


def test_far_requests_compete_for_one_vehicle(horizon, make_request, window):
    net = NetworkService(NetworkConfig()).from_coordinates(
        {0: (15.0, 0.0), 1: (0.0, 0.0), 2: (1.0, 0.0), 3: (30.0, 0.0), 4: (31.0, 0.0)}
    )
    near = make_request(1, 1, 2, 60.0, net, lead=60.0)
    far = make_request(2, 3, 4, 60.0, net, lead=59.0)
    result = horizon.run([near, far], RunConfig(vehicles=1), net, window)
    assert result.solution.accepted == {1}
    assert result.solution.denied == {2}
    decisions = {e.request: e.detail["decision"] for e in result.events if e.type == EventType.DECISION}
    assert decisions == {1: Decision.ACCEPTED, 2: Decision.DENIED}


def test_finished_request_does_not_block_the_next_one(horizon, line_network, make_request, window):
    first = make_request(1, 1, 2, 10.0, line_network)
    second = make_request(2, 3, 4, 120.0, line_network)
    run_cfg = RunConfig(vehicles=1)
    result = horizon.run([first, second], run_cfg, line_network, window)
    sol = result.solution
    assert sol.accepted == {1, 2} and sol.denied == set()
    assert result.solves == 2

    times = {(e.type, e.request): e.time for e in result.events if e.request is not None}
    assert times[(EventType.DROPOFF, 1)] < second.reveal_time
    assert violations_of(result, [first, second], line_network, run_cfg) == []


def test_everything_known_at_the_start_matches_one_shot(horizon, line_network, make_request, window):
    requests = [
        make_request(1, 1, 3, 60.0, line_network, lead=60.0),
        make_request(2, 2, 4, 62.0, line_network, lead=62.0),
        make_request(3, 4, 1, 70.0, line_network, lead=70.0),
    ]
    assert all(r.reveal_time == 0.0 for r in requests)
    run_cfg = RunConfig(vehicles=2)
    result = horizon.run(requests, run_cfg, line_network, window)

    heuristic = PathHeuristic(run_cfg.heuristic)
    graph = EventGraph(line_network, run_cfg.capacity, window)
    for req in requests:
        graph.insert_request(req, heuristic.select_feasible_paths(
            req, graph.requests.values(), line_network, run_cfg.capacity
        ))
    solver = SubproblemSolver(SolverConfig(omega1=run_cfg.omega1, omega2=run_cfg.omega2, omega3=run_cfg.omega3))
    one_shot = solver.solve(solver.build_instance(graph, run_cfg.vehicles, clock=0.0))

    assert one_shot.optimal and result.solution.optimal
    assert result.solution.accepted == one_shot.accepted == {1, 2, 3}
    assert result.solution.objective == pytest.approx(one_shot.objective, abs=1e-6)
    assert result.solution.routing_cost == pytest.approx(one_shot.routing_cost, abs=1e-6)


def test_denials_follow_the_fleet_scenarios(horizon, make_request, window):
    # two stop pairs 30 km apart, the depot in the middle
    net = NetworkService(NetworkConfig()).from_coordinates(
        {0: (15.0, 0.0), 1: (0.0, 0.0), 2: (1.0, 0.0), 3: (30.0, 0.0), 4: (31.0, 0.0)}
    )
    requests = [
        make_request(1, 1, 2, 60.0, net, lead=60.0),
        make_request(2, 3, 4, 60.0, net, lead=60.0),
        make_request(3, 2, 1, 61.0, net, lead=61.0),
        make_request(4, 4, 3, 61.0, net, lead=61.0),
    ]
    plan = fleet_service.fleet_plan("Fri", 16.0)
    denied = {}
    for scenario in ("A", "B", "C"):
        result = horizon.run(requests, RunConfig(vehicles=plan.vehicles(scenario)), net, window)
        assert result.solution.optimal
        denied[scenario] = len(result.solution.denied)
    assert (plan.scenario_b, plan.scenario_a, plan.scenario_c) == (1, 2, 3)
    assert denied["C"] <= denied["A"] <= denied["B"]
    # one vehicle cannot reach both ends of the network
    assert denied["B"] == 2 and denied["A"] == 0


def test_duplicate_ids_are_rejected(horizon, line_network, make_request, window):
    req = make_request(1, 1, 2, 60.0, line_network)
    with pytest.raises(DuplicateRequestError):
        horizon.run([req, req], RunConfig(vehicles=1), line_network, window)


# ==================== RANDOM EVENINGS ====================

def test_routes_pass_the_validator(random_run):
    net, requests, run_cfg, result = random_run
    assert violations_of(result, requests, net, run_cfg) == []
    assert result.solution.accepted | result.solution.denied == {r.id for r in requests}
    assert not result.solution.accepted & result.solution.denied


@pytest.mark.parametrize("seed", range(20, 26))
def test_random_evenings_pass_the_validator(horizon, request_service, window, seed):
    net, requests, run_cfg, result = random_evening(horizon, request_service, window, seed, n=12)
    assert violations_of(result, requests, net, run_cfg) == []
    assert result.solution.accepted


@pytest.mark.slow
def test_two_hundred_evenings_pass_the_validator(horizon, request_service, window):
    for seed in range(200):
        n = int(np.random.default_rng(seed).integers(5, 41))
        net, requests, run_cfg, result = random_evening(
            horizon, request_service, window, seed, n, time_limit_s=2.0, node_limit=200
        )
        violations = violations_of(result, requests, net, run_cfg)
        assert violations == [], f"seed {seed}: {violations[:3]}"


def test_event_log_replay_matches(random_run, horizon, tmp_path):
    net, requests, _, result = random_run
    path = horizon.write_event_log(result, tmp_path / "events.jsonl", meta={"day": "Mon", "vehicles": 2})
    records = horizon.read_event_log(path)
    assert records[0]["type"] == "meta"
    assert records[0]["config_hash"]

    from_traces = metrics_service.report_from_solution(result.solution, requests, net)
    from_log = metrics_service.report_from_event_log(records, net)
    metrics_service.check_reports(from_traces, from_log, tol=1e-6)


def test_metric_identities(random_run):
    net, requests, _, result = random_run
    by_id = {r.id: r for r in requests}
    outcomes = metrics_service.outcomes_from_solution(result.solution, requests)
    for o in outcomes:
        if not o.accepted:
            continue
        req = by_id[o.request_id]
        assert o.wait >= -1e-9
        assert o.transport == pytest.approx(o.wait + req.service + o.ride)
        assert o.regret == pytest.approx(o.transport - (req.e_drop - req.e_pick))
        assert o.ride <= req.max_ride + 1e-6


def test_decisions_follow_the_reveal(random_run):
    _, requests, run_cfg, result = random_run
    reveal = {r.id: r.reveal_time for r in requests}
    decisions = [e for e in result.events if e.type == EventType.DECISION]
    assert sorted(e.request for e in decisions) == sorted(reveal)
    for e in decisions:
        assert e.time <= reveal[e.request] + run_cfg.delta_min + 1e-9
    accepted = {e.request for e in decisions if e.detail["decision"] == Decision.ACCEPTED}
    assert accepted == result.solution.accepted
    assert [e.time for e in result.events] == sorted(e.time for e in result.events)


def test_route_traces(random_run, horizon, tmp_path):
    _, _, run_cfg, result = random_run
    frame = horizon.route_frame(result.solution.routes, run_cfg.capacity)
    picked = set(frame.loc[frame["kind"] == "+", "request"].astype(int))
    assert picked == result.solution.accepted
    assert horizon.write_route_traces(result, tmp_path / "routes.csv").exists()
