"""
Rolling Horizon Service Module
===============================
Online loop over one evening: every revealed request is inserted into the
event graph, the routing subproblem is re-solved at its decision time and
the accept/deny answer is fixed for the rest of the run.

ARCHITECTURE:
------------
    reveal r  ->  advance vehicles to tau = reveal + delta
              ->  release finished requests
              ->  select paths + insert r into the event graph
              ->  solve MILP(tau) warm-started from the current plan
              ->  decide r, install plans, communicate pick-up times

COMMITMENT:
----------
A planned stop is frozen once the vehicle has to leave for it, i.e. its
start time minus the travel time from the previous stop lies before tau.
The last frozen stop of a vehicle is its anchor: later subproblems start the
vehicle there. Returns to the depot are only frozen when the evening ends,
so an idle vehicle waits at its last stop.

A pick-up time is communicated when the request is accepted. Later plans
may move it earlier freely but may postpone it by at most max_postpone.

DEVELOPER NOTES:
---------------
- Requests in the graph carry tightened windows; metrics always use the
  original requests passed to run().
- A denial is "timeout_denied" when the solve hit its time or node limit.
"""

import json
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union

import pandas as pd

from ..config import SolverConfig
from ..models.graph import DEPOT_NODE, DROPOFF, PICKUP, EventNode, Route, ScheduledStop
from ..models.horizon import EventRecord, HorizonState, RunConfig, RunResult, VehicleState
from ..models.network import StopNetwork
from ..models.request import Request, ServiceWindow
from ..models.solution import Anchor, MilpInstance, SubproblemSolution
from ..utils.constants import Decision, EventType
from ..utils.decorators import timed
from ..utils.errors import DuplicateRequestError
from ..utils.helpers import config_hash
from ..utils.logger import logger
from .event_graph_service import EventGraph
from .path_heuristic import PathHeuristic
from .subproblem_solver import PlanRoute, SubproblemSolver

TIME_EPS = 1e-9

ROUTE_TRACE_COLUMNS = ["vehicle", "seq", "node", "request", "kind", "stop", "time"]


class RollingHorizonService:
    """Runs the online accept/deny and routing loop"""

    # ==================== RUN ====================

    @timed
    def run(
        self,
        requests: Sequence[Request],
        run_cfg: RunConfig,
        net: StopNetwork,
        window: Optional[ServiceWindow] = None,
    ) -> RunResult:
        window = window or ServiceWindow()
        ids = [r.id for r in requests]
        if len(set(ids)) != len(ids):
            raise DuplicateRequestError("request ids in a scenario must be unique")

        solver = SubproblemSolver(SolverConfig(
            omega1=run_cfg.omega1,
            omega2=run_cfg.omega2,
            omega3=run_cfg.omega3,
            time_limit_s=run_cfg.time_limit_s,
            node_limit=run_cfg.node_limit,
        ))
        heuristic = PathHeuristic(run_cfg.heuristic)
        graph = EventGraph(net, run_cfg.capacity, window)
        state = HorizonState(
            vehicles={v: VehicleState(v) for v in range(1, run_cfg.vehicles + 1)},
            clock=window.e0,
        )
        originals = {r.id: r for r in requests}
        events: List[EventRecord] = []
        communicated: Dict[int, float] = {}
        solves = 0

        ordered = sorted(requests, key=lambda r: (r.reveal_time, r.id))
        logger.info(f"Rolling horizon: {len(ordered)} requests, {run_cfg.vehicles} vehicles")

        for req in ordered:
            tau = max(state.clock, req.reveal_time + run_cfg.delta_min)
            events.append(EventRecord(EventType.REVEAL, req.reveal_time, request=req.id, stop=req.pickup_stop, detail={
                "dropoff_stop": req.dropoff_stop,
                "group_size": req.group_size,
                "e_pick": req.e_pick,
                "l_pick": req.l_pick,
                "e_drop": req.e_drop,
                "l_drop": req.l_drop,
                "service": req.service,
                "t_direct": req.t_direct,
            }))
            self._advance(state, graph, tau, events, net)
            self._release(state, graph)

            existing = [graph.requests[r] for r in sorted(state.active)]
            paths = heuristic.select_feasible_paths(req, existing, net, run_cfg.capacity)
            graph.insert_request(req, paths)
            graph.prune(state.anchored_nodes())

            inst = solver.build_instance(
                graph,
                run_cfg.vehicles,
                clock=tau,
                anchors=self._anchors(state),
                onboard_pickup=state.onboard_pickup,
                active=state.active | {req.id},
                fixed_accept=state.active,
            )
            warm = self._warm_start(solver, inst, state, req)
            solution = solver.solve(inst, warm_start=warm)
            solves += 1
            state.all_optimal &= solution.optimal

            if req.id in solution.accepted:
                decision = Decision.ACCEPTED
                state.accepted.add(req.id)
            else:
                decision = Decision.DENIED if solution.optimal else Decision.TIMEOUT_DENIED
                state.denied.add(req.id)
                graph.remove_request(req.id)
            events.append(EventRecord(EventType.DECISION, tau, request=req.id, detail={
                "decision": decision,
                "objective": solution.objective,
                "optimal": solution.optimal,
                "nodes_explored": solution.nodes_explored,
            }))
            logger.debug(f"request {req.id} {decision} at {tau:.2f}")

            self._install(state, solution)
            self._communicate(state, graph, run_cfg, tau, events, communicated)
            graph.prune(state.anchored_nodes())

        self._advance(state, graph, float("inf"), events, net, final=True)
        final = self._final_solution(state, originals, net, run_cfg)
        events.sort(key=lambda e: e.time)
        logger.info(
            f"Rolling horizon done: {len(final.accepted)} accepted, {len(final.denied)} denied, "
            f"cost {final.routing_cost:.2f} km"
        )
        return RunResult(solution=final, events=events, solves=solves)

    # ==================== VEHICLE MOVEMENT ====================

    def _advance(
        self,
        state: HorizonState,
        graph: EventGraph,
        tau: float,
        events: List[EventRecord],
        net: StopNetwork,
        final: bool = False,
    ) -> None:
        """Freeze every planned stop the vehicles must have left for before tau"""
        for vs in state.vehicles.values():
            while vs.plan:
                nxt = vs.plan[0]
                prev_stop = vs.anchor.stop if vs.anchor else net.depot
                departure = nxt.time - net.t(prev_stop, nxt.stop)
                if nxt.node.is_depot and not final:
                    break
                if not final and departure >= tau - TIME_EPS:
                    break
                if not vs.executed:
                    events.append(EventRecord(EventType.DEPOT_DEPARTURE, departure, vehicle=vs.vehicle, stop=net.depot))
                vs.plan.pop(0)
                vs.executed.append(nxt)
                self._commit(state, graph, vs, nxt, events)
            if final:
                vs.plan = []
        if not final:
            state.clock = tau

    def _commit(self, state: HorizonState, graph: EventGraph, vs: VehicleState,
                stop: ScheduledStop, events: List[EventRecord]) -> None:
        node = stop.node
        label = node.label(graph.capacity)
        if node.is_depot:
            vs.returned = True
            events.append(EventRecord(EventType.DEPOT_RETURN, stop.time, vehicle=vs.vehicle, stop=stop.stop))
            return
        if node.is_pickup:
            state.onboard_pickup[node.request] = stop.time
            graph.update_request(graph.requests[node.request].tighten_pickup(stop.time, stop.time))
            events.append(EventRecord(EventType.PICKUP, stop.time, request=node.request,
                                      vehicle=vs.vehicle, stop=stop.stop, node=label))
        else:
            state.completed.add(node.request)
            state.onboard_pickup.pop(node.request, None)
            events.append(EventRecord(EventType.DROPOFF, stop.time, request=node.request,
                                      vehicle=vs.vehicle, stop=stop.stop, node=label))

    def _release(self, state: HorizonState, graph: EventGraph) -> None:
        """Drop finished requests unless a vehicle is still anchored at one of their events"""
        anchored = state.anchored_nodes()
        for rid in state.completed:
            state.onboard_pickup.pop(rid, None)
        for rid in sorted(state.completed & set(graph.requests)):
            if not any(v.references(rid) for v in anchored):
                graph.remove_request(rid)

    @staticmethod
    def _anchors(state: HorizonState) -> List[Anchor]:
        return [
            Anchor(vehicle=vs.vehicle, node=vs.anchor.node, time=vs.anchor.time)
            for vs in state.vehicles.values()
            if vs.anchor is not None
        ]

    # ==================== PLANS ====================

    def _current_plan(self, state: HorizonState) -> List[PlanRoute]:
        plan = []
        for vs in state.vehicles.values():
            start = vs.anchor.node if vs.anchor else DEPOT_NODE
            nodes = [s.node for s in vs.plan]
            if vs.anchor is not None or nodes:
                plan.append((vs.vehicle, start, nodes))
        return plan

    def _warm_start(self, solver: SubproblemSolver, inst: MilpInstance,
                    state: HorizonState, req: Request) -> Optional[List[PlanRoute]]:
        """Best of: current plan with the new request denied, or inserted solo somewhere"""
        base = self._current_plan(state)
        pick, drop = EventNode(req.id, PICKUP), EventNode(req.id, DROPOFF)
        candidates = [base]
        for k, (vehicle, start, nodes) in enumerate(base):
            for pos in range(len(nodes)):
                prev = start if pos == 0 else nodes[pos - 1]
                if prev.after():
                    continue
                routed = nodes[:pos] + [pick, drop] + nodes[pos:]
                candidates.append(base[:k] + [(vehicle, start, routed)] + base[k + 1:])
        used = {vehicle for vehicle, _, _ in base}
        idle = [v for v in range(1, inst.vehicles + 1) if v not in used]
        if idle:
            candidates.append(base + [(idle[0], DEPOT_NODE, [pick, drop, DEPOT_NODE])])

        best, best_value = None, float("inf")
        for plan in candidates:
            ev = solver.evaluate(inst, plan)
            if ev is not None and ev.objective < best_value:
                best, best_value = plan, ev.objective
        return best

    def _install(self, state: HorizonState, solution: SubproblemSolution) -> None:
        for vs in state.vehicles.values():
            vs.plan = []
        for route in solution.routes:
            state.vehicles[route.vehicle].plan = list(route.stops)

    def _communicate(
        self,
        state: HorizonState,
        graph: EventGraph,
        run_cfg: RunConfig,
        tau: float,
        events: List[EventRecord],
        communicated: Dict[int, float],
    ) -> None:
        """Send first and changed pick-up times; the first one bounds postponement"""
        for vs in state.vehicles.values():
            for stop in vs.plan:
                node = stop.node
                if not node.is_pickup:
                    continue
                rid = node.request
                if rid not in state.promised:
                    state.promised[rid] = stop.time
                    req = graph.requests[rid]
                    graph.update_request(req.tighten_pickup(latest=stop.time + run_cfg.max_postpone))
                elif abs(communicated[rid] - stop.time) <= 1e-6:
                    continue
                communicated[rid] = stop.time
                events.append(EventRecord(EventType.COMMUNICATE, tau, request=rid, vehicle=vs.vehicle, detail={
                    "pickup_time": stop.time,
                    "promised": state.promised[rid],
                }))

    # ==================== RESULT ====================

    def _final_solution(self, state: HorizonState, originals: Dict[int, Request],
                        net: StopNetwork, run_cfg: RunConfig) -> SubproblemSolution:
        routes, times = [], {}
        cost = regret = 0.0
        for vs in state.vehicles.values():
            if not vs.executed:
                continue
            prev = net.depot
            for stop in vs.executed:
                cost += net.c(prev, stop.stop)
                prev = stop.stop
                if not stop.node.is_depot:
                    times[stop.node] = stop.time
                if stop.node.is_dropoff:
                    regret += stop.time - originals[stop.node.request].e_drop
            routes.append(Route(vehicle=vs.vehicle, stops=list(vs.executed), start=DEPOT_NODE))
        denied = set(state.denied)
        return SubproblemSolution(
            accepted=set(state.accepted),
            denied=denied,
            routes=routes,
            service_start=times,
            objective=run_cfg.omega1 * cost + run_cfg.omega2 * regret + run_cfg.omega3 * len(denied),
            routing_cost=cost,
            regret=regret,
            optimal=state.all_optimal,
            status="optimal" if state.all_optimal else "limit",
        )

    # ==================== FILES ====================

    def write_event_log(self, result: RunResult, path: Union[str, Path], meta: Optional[dict] = None) -> Path:
        """JSON lines; the first line carries the run metadata"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        header = {"type": "meta", **(meta or {})}
        header.setdefault("config_hash", config_hash(meta or {}))
        with open(path, "w", encoding="utf-8") as f:
            f.write(json.dumps(header, sort_keys=True) + "\n")
            for record in result.events:
                f.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")
        return path

    def read_event_log(self, path: Union[str, Path]) -> List[dict]:
        records = []
        with open(path, "r", encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if line:
                    records.append(json.loads(line))
        return records

    def route_frame(self, routes: Iterable[Route], capacity: int = 0) -> pd.DataFrame:
        rows = []
        for route in routes:
            for seq, stop in enumerate(route.stops, start=1):
                rows.append({
                    "vehicle": route.vehicle,
                    "seq": seq,
                    "node": stop.node.label(capacity),
                    "request": None if stop.node.is_depot else stop.node.request,
                    "kind": stop.node.kind,
                    "stop": stop.stop,
                    "time": stop.time,
                })
        return pd.DataFrame(rows, columns=ROUTE_TRACE_COLUMNS)

    def write_route_traces(self, result: RunResult, path: Union[str, Path], capacity: int = 0) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.route_frame(result.solution.routes, capacity).to_csv(path, index=False)
        return path


# Global rolling horizon service instance
horizon_service = RollingHorizonService()
