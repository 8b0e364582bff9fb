"""
Subproblem Solver Module
=========================
Routing subproblem on the event graph: choose arcs for up to K vehicles,
accept or deny each active request, and time every event.

FORMULATION:
-----------
Variables: x_a (arc used), B_v (service start at event v), BP_i and BD_i
(pick-up and drop-off start of request i), r_i (regret), p_i (accepted).

    min  w1 * sum c_a x_a + w2 * sum r_i + w3 * sum (1 - p_i)

- flow conservation at every event; anchored vehicles are unit sources at
  their current event, the rest leave the depot (at most K - #anchored)
- each accepted request is picked up and dropped off exactly once
- B propagates along used arcs (big-M with a tight M per arc); arcs out of
  the depot or an anchor cannot start before the current clock
- BP/BD copy the start time of whichever pick-up/drop-off node is used
- ride time BD - BP <= s + max_ride, regret r >= BD - e_drop for accepted requests

SEARCH:
------
Best-first branch and bound on the x variables with LP bounds from HiGHS
(scipy.optimize.linprog). Only variable bounds change between nodes. p is
integral whenever x is. An integral x is accepted only when its routes
evaluate to the LP value; otherwise the node is split on a still unfixed
arc. The warm-start plan, if any, is the first incumbent.
Time and node limits stop the search early; the result is then flagged as
not proven optimal.
"""

import heapq
import time
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from ..config import SolverConfig, config
from ..models.graph import DEPOT_NODE, EventNode, Route, ScheduledStop
from ..models.solution import Anchor, MilpInstance, SubproblemSolution
from ..utils.decorators import timed
from ..utils.errors import InconsistentFixingError, InfeasibleError
from ..utils.logger import logger
from .event_graph_service import EventGraph
from .schedule_service import TimedEvent, schedule_service

EPS = 1e-7
OBJ_TOL = 1e-6

# (vehicle, start node, visited nodes ending at the depot)
PlanRoute = Tuple[int, EventNode, List[EventNode]]


@dataclass
class LinearProgram:
    c: np.ndarray
    constant: float
    A_ub: Optional[sparse.csr_matrix]
    b_ub: Optional[np.ndarray]
    A_eq: Optional[sparse.csr_matrix]
    b_eq: Optional[np.ndarray]
    lb: np.ndarray
    ub: np.ndarray
    arcs: List[Tuple[EventNode, EventNode]]
    names: List[str] = field(default_factory=list)

    @property
    def n_arcs(self) -> int:
        return len(self.arcs)


@dataclass
class Evaluation:
    objective: float
    routing_cost: float
    regret: float
    served: Set[int]
    routes: List[Route]
    times: Dict[EventNode, float]


class _Rows:
    """Sparse constraint rows collected as {column: coefficient} dicts"""

    def __init__(self):
        self.rows: List[Dict[int, float]] = []
        self.rhs: List[float] = []

    def add(self, coeffs: Dict[int, float], rhs: float) -> None:
        self.rows.append(coeffs)
        self.rhs.append(rhs)

    def matrix(self, n: int) -> Tuple[Optional[sparse.csr_matrix], Optional[np.ndarray]]:
        if not self.rows:
            return None, None
        r, c, v = [], [], []
        for k, coeffs in enumerate(self.rows):
            for col, val in coeffs.items():
                r.append(k)
                c.append(col)
                v.append(val)
        shape = (len(self.rows), n)
        return sparse.coo_matrix((v, (r, c)), shape=shape).tocsr(), np.asarray(self.rhs, dtype=float)


class SubproblemSolver:
    """Builds and solves routing subproblems"""

    def __init__(self, settings: Optional[SolverConfig] = None):
        self.settings = settings or config.solver

    # ==================== INSTANCE ====================

    def build_instance(
        self,
        graph: EventGraph,
        vehicles: int,
        clock: Optional[float] = None,
        anchors: Iterable[Anchor] = (),
        onboard_pickup: Optional[Dict[int, float]] = None,
        active: Optional[Iterable[int]] = None,
        fixed_accept: Iterable[int] = (),
        fixed_deny: Iterable[int] = (),
        weights: Optional[SolverConfig] = None,
    ) -> MilpInstance:
        weights = weights or self.settings
        window = graph.window
        clock = window.e0 if clock is None else clock
        active_ids = set(graph.requests) if active is None else set(active)
        onboard = dict(onboard_pickup or {})
        anchors = sorted(anchors, key=lambda a: a.vehicle)
        accept = set(fixed_accept) | set(onboard)
        deny = set(fixed_deny)

        if len(anchors) > vehicles:
            raise InconsistentFixingError(f"{len(anchors)} anchored vehicles but only {vehicles} available")
        if accept & deny:
            raise InconsistentFixingError(f"requests fixed both accepted and denied: {sorted(accept & deny)}")
        unknown = (accept | deny | active_ids) - set(graph.requests)
        if unknown:
            raise InconsistentFixingError(f"fixings reference requests outside the graph: {sorted(unknown)}")
        if not set(onboard) <= active_ids:
            raise InconsistentFixingError("onboard requests must be active")
        anchor_nodes = [a.node for a in anchors]
        if len(set(anchor_nodes)) != len(anchor_nodes) or len({a.vehicle for a in anchors}) != len(anchors):
            raise InconsistentFixingError("two vehicles anchored at the same event")
        for a in anchors:
            if a.node not in graph.graph:
                raise InconsistentFixingError(f"anchor {a.node.label()} of vehicle {a.vehicle} is not in the graph")
            if not 1 <= a.vehicle <= vehicles:
                raise InconsistentFixingError(f"vehicle {a.vehicle} outside 1..{vehicles}")

        anchor_set = set(anchor_nodes)

        def usable(v: EventNode) -> bool:
            if v.is_depot or v in anchor_set:
                return False
            if not (v.request in active_ids and all(o in active_ids for o in v.others)):
                return False
            return not (v.is_pickup and v.request in onboard)

        usable_nodes = [v for v in graph.nodes if usable(v)]
        nodes = anchor_nodes + usable_nodes
        heads = set(usable_nodes) | {DEPOT_NODE}
        tails = set(nodes) | {DEPOT_NODE}
        arcs = [
            (u, w) for u, w in graph.arcs
            if u in tails and w in heads and not (u.is_depot and w.is_depot)
        ]

        earliest, latest = {}, {}
        for v in nodes:
            earliest[v], latest[v] = graph.time_window(v)
        for a in anchors:
            e, l_ = earliest[a.node], latest[a.node]
            if a.time < e - 1e-6 or a.time > l_ + 1e-6:
                raise InconsistentFixingError(
                    f"anchor {a.node.label()} at {a.time:.3f} outside window [{e:.3f}, {l_:.3f}]"
                )
            earliest[a.node] = latest[a.node] = a.time

        return MilpInstance(
            nodes=nodes,
            arcs=arcs,
            arc_cost=[graph.arc_cost(u, w) for u, w in arcs],
            arc_time=[graph.arc_time(u, w) for u, w in arcs],
            earliest=earliest,
            latest=latest,
            service={v: graph.service(v) for v in nodes} | {DEPOT_NODE: 0.0},
            stop={v: graph.stop(v) for v in nodes} | {DEPOT_NODE: graph.net.depot},
            requests={i: graph.requests[i] for i in sorted(active_ids)},
            vehicles=vehicles,
            window=window,
            clock=clock,
            omega1=weights.omega1,
            omega2=weights.omega2,
            omega3=weights.omega3,
            anchors=list(anchors),
            onboard_pickup=onboard,
            fixed_accept=accept,
            fixed_deny=deny,
        )

    # ==================== FORMULATION ====================

    def formulate(self, inst: MilpInstance, order_seed: Optional[int] = None) -> LinearProgram:
        order = list(range(len(inst.arcs)))
        if order_seed is not None:
            np.random.default_rng(order_seed).shuffle(order)
        arcs = [inst.arcs[k] for k in order]
        arc_cost = [inst.arc_cost[k] for k in order]
        arc_time = [inst.arc_time[k] for k in order]

        A, N = len(arcs), len(inst.nodes)
        rids = sorted(inst.requests)
        R = len(rids)
        node_col = {v: A + k for k, v in enumerate(inst.nodes)}
        base = A + N
        bp_col = {r: base + k for k, r in enumerate(rids)}
        bd_col = {r: base + R + k for k, r in enumerate(rids)}
        rg_col = {r: base + 2 * R + k for k, r in enumerate(rids)}
        p_col = {r: base + 3 * R + k for k, r in enumerate(rids)}
        n = base + 4 * R

        c = np.zeros(n)
        lb = np.zeros(n)
        ub = np.ones(n)
        names = [f"x_{k}" for k in range(A)] + [f"B_{k}" for k in range(N)]
        for tag in ("BP", "BD", "R", "P"):
            names += [f"{tag}_{r}" for r in rids]

        into, out = defaultdict(list), defaultdict(list)
        for k, (u, w) in enumerate(arcs):
            into[w].append(k)
            out[u].append(k)
            c[k] = inst.omega1 * arc_cost[k]
        for v, col in node_col.items():
            lb[col], ub[col] = inst.earliest[v], inst.latest[v]

        ub_rows, eq_rows = _Rows(), _Rows()
        anchor_time = {a.node: a.time for a in inst.anchors}
        e0, l0 = inst.window.e0, inst.window.l0

        # Flow conservation
        for v in inst.nodes:
            coeffs = {k: 1.0 for k in into[v]}
            coeffs.update({k: -1.0 for k in out[v]})
            eq_rows.add(coeffs, -1.0 if v in anchor_time else 0.0)
        n_anchors = len(inst.anchors)
        ub_rows.add({k: 1.0 for k in out[DEPOT_NODE]}, float(inst.vehicles - n_anchors))
        depot_balance = {k: 1.0 for k in into[DEPOT_NODE]}
        depot_balance.update({k: -1.0 for k in out[DEPOT_NODE]})
        eq_rows.add(depot_balance, float(n_anchors))

        # Time propagation
        for k, (u, w) in enumerate(arcs):
            s_u, t = inst.service[u], arc_time[k]
            if u.is_depot:
                start = max(e0, inst.clock)
            elif u in anchor_time:
                start = max(anchor_time[u] + s_u, inst.clock)
            else:
                start = None

            if w.is_depot:
                if start is not None:
                    if start + t > l0 + EPS:
                        ub[k] = 0.0
                    continue
                big_m = inst.latest[u] + s_u + t - l0
                if big_m > EPS:
                    ub_rows.add({node_col[u]: 1.0, k: big_m}, big_m + l0 - s_u - t)
                continue

            if start is not None:
                need = start + t
                if need > inst.latest[w] + EPS:
                    ub[k] = 0.0
                    continue
                big_m = need - inst.earliest[w]
                if big_m > EPS:
                    ub_rows.add({node_col[w]: -1.0, k: big_m}, big_m - need)
            else:
                big_m = inst.latest[u] + s_u + t - inst.earliest[w]
                if big_m > EPS:
                    ub_rows.add({node_col[u]: 1.0, node_col[w]: -1.0, k: big_m}, big_m - s_u - t)

        # Requests
        constant = 0.0
        for r in rids:
            req = inst.requests[r]
            picks = [v for v in inst.nodes if v.is_pickup and v.request == r and v not in anchor_time]
            drops = [v for v in inst.nodes if v.is_dropoff and v.request == r and v not in anchor_time]
            onboard = r in inst.onboard_pickup
            bp, bd, rg, p = bp_col[r], bd_col[r], rg_col[r], p_col[r]

            if onboard:
                lb[bp] = ub[bp] = inst.onboard_pickup[r]
            elif picks:
                lb[bp] = min(inst.earliest[v] for v in picks)
                ub[bp] = max(inst.latest[v] for v in picks)
            else:
                lb[bp], ub[bp] = req.e_pick, req.l_pick
            if drops:
                lb[bd] = min(inst.earliest[v] for v in drops)
                ub[bd] = max(inst.latest[v] for v in drops)
            else:
                lb[bd], ub[bd] = req.e_drop, req.l_drop
            lb[rg], ub[rg] = 0.0, max(0.0, ub[bd] - req.e_drop)

            c[rg] = inst.omega2
            c[p] = -inst.omega3
            constant += inst.omega3

            servable = drops and (onboard or picks)
            if r in inst.fixed_accept:
                if not servable:
                    raise InconsistentFixingError(f"request {r} is fixed accepted but has no usable events")
                lb[p] = 1.0
            if r in inst.fixed_deny or not servable:
                ub[p] = 0.0

            if not onboard:
                coeffs = {k: 1.0 for v in picks for k in into[v]}
                coeffs[p] = -1.0
                eq_rows.add(coeffs, 0.0)
                for v in picks:
                    self._link(ub_rows, into[v], bp, node_col[v], lb[bp], ub[bp], inst.earliest[v], inst.latest[v])
            coeffs = {k: 1.0 for v in drops for k in into[v]}
            coeffs[p] = -1.0
            eq_rows.add(coeffs, 0.0)
            for v in drops:
                self._link(ub_rows, into[v], bd, node_col[v], lb[bd], ub[bd], inst.earliest[v], inst.latest[v])

            ride = req.service + req.max_ride
            slack = max(0.0, ub[bd] - lb[bp] - ride)
            ub_rows.add({bd: 1.0, bp: -1.0, p: slack}, ride + slack)
            big_m = ub[rg]
            ub_rows.add({bd: 1.0, rg: -1.0, p: big_m}, big_m + req.e_drop)

        A_ub, b_ub = ub_rows.matrix(n)
        A_eq, b_eq = eq_rows.matrix(n)
        return LinearProgram(c, constant, A_ub, b_ub, A_eq, b_eq, lb, ub, arcs, names)

    @staticmethod
    def _link(rows: _Rows, arcs_in: List[int], copy_col: int, node_col: int,
              copy_lb: float, copy_ub: float, e_v: float, l_v: float) -> None:
        """copy == B_v whenever node v is entered"""
        m1 = copy_ub - e_v
        if m1 > EPS:
            coeffs = {copy_col: 1.0, node_col: -1.0}
            coeffs.update({k: m1 for k in arcs_in})
            rows.add(coeffs, m1)
        m2 = l_v - copy_lb
        if m2 > EPS:
            coeffs = {node_col: 1.0, copy_col: -1.0}
            coeffs.update({k: m2 for k in arcs_in})
            rows.add(coeffs, m2)

    def _solve_lp(self, lp: LinearProgram, lb: np.ndarray, ub: np.ndarray) -> Optional[Tuple[float, np.ndarray]]:
        result = linprog(
            lp.c,
            A_ub=lp.A_ub,
            b_ub=lp.b_ub,
            A_eq=lp.A_eq,
            b_eq=lp.b_eq,
            bounds=np.column_stack([lb, ub]),
            method="highs",
        )
        if result.status == 0:
            return float(result.fun) + lp.constant, result.x
        if result.status != 2:
            logger.debug(f"LP relaxation ended with status {result.status}: {result.message}")
        return None

    # ==================== SEARCH ====================

    @timed
    def solve(
        self,
        inst: MilpInstance,
        warm_start: Optional[Sequence[PlanRoute]] = None,
        time_limit_s: Optional[float] = None,
        node_limit: Optional[int] = None,
        order_seed: Optional[int] = None,
    ) -> SubproblemSolution:
        time_limit_s = self.settings.time_limit_s if time_limit_s is None else time_limit_s
        node_limit = self.settings.node_limit if node_limit is None else node_limit
        tol = self.settings.integrality_tol
        started = time.perf_counter()

        lp = self.formulate(inst, order_seed)
        incumbent: Optional[Evaluation] = None
        if warm_start is not None:
            incumbent = self.evaluate(inst, warm_start)
            if incumbent is None:
                logger.debug("warm start plan is infeasible, ignored")

        root = self._solve_lp(lp, lp.lb, lp.ub)
        if root is None:
            if incumbent is None:
                raise InfeasibleError("subproblem LP relaxation is infeasible")
            return self._solution(inst, incumbent, optimal=False, bound=incumbent.objective, explored=0, status="lp_failed")

        heap: List[Tuple[float, int, Tuple[Tuple[int, float], ...], int]] = []
        counter = 0
        bound, x_root = root
        limited = False
        explored = 0

        def consider(obj: float, x: np.ndarray, fixes) -> None:
            nonlocal incumbent, counter
            upper = incumbent.objective if incumbent else np.inf
            if obj >= upper - EPS:
                return
            branch = self._branch_variable(x[:lp.n_arcs], tol)
            if branch is None:
                candidate = self.evaluate(inst, self._decompose(inst, lp, x))
                if candidate is not None and candidate.objective < upper - EPS:
                    incumbent = candidate
                    logger.debug(f"new incumbent {candidate.objective:.4f}")
                if candidate is not None and candidate.objective <= obj + OBJ_TOL * max(1.0, abs(obj)):
                    return
                # integral arcs but the plan fails evaluation or misses the LP value: keep splitting
                branch = self._free_arc(x[:lp.n_arcs], fixes)
                if branch is None or (incumbent is not None and obj >= incumbent.objective - EPS):
                    return
            counter += 1
            heapq.heappush(heap, (obj, counter, fixes, branch))

        consider(bound, x_root, ())
        while heap:
            obj, _, fixes, k = heap[0]
            upper = incumbent.objective if incumbent else np.inf
            if obj >= upper - EPS:
                heap.clear()
                break
            if (time.perf_counter() - started) > time_limit_s or (node_limit and explored >= node_limit):
                limited = True
                break
            heapq.heappop(heap)
            explored += 1
            for value in (1.0, 0.0):
                child = fixes + ((k, value),)
                lb, ub = lp.lb.copy(), lp.ub.copy()
                for col, val in child:
                    lb[col] = ub[col] = val
                result = self._solve_lp(lp, lb, ub)
                if result is not None:
                    consider(result[0], result[1], child)

        if incumbent is None:
            incumbent = self.evaluate(inst, [])
            if incumbent is None:
                raise InfeasibleError("no feasible routing found for the subproblem")
            limited = True

        if limited:
            final_bound = min([h[0] for h in heap] + [incumbent.objective])
            status = "limit"
        else:
            final_bound = incumbent.objective
            status = "optimal"
        logger.debug(
            f"B&B: {explored} nodes, objective {incumbent.objective:.4f}, bound {final_bound:.4f}, "
            f"{time.perf_counter() - started:.2f}s"
        )
        return self._solution(inst, incumbent, optimal=not limited, bound=final_bound, explored=explored, status=status)

    @staticmethod
    def _branch_variable(x: np.ndarray, tol: float) -> Optional[int]:
        """Most fractional arc variable, lowest index on ties"""
        if x.size == 0:
            return None
        distance = np.minimum(x - np.floor(x), np.ceil(x) - x)
        k = int(np.argmax(distance))
        return k if distance[k] > tol else None

    @staticmethod
    def _free_arc(x: np.ndarray, fixes: Tuple[Tuple[int, float], ...]) -> Optional[int]:
        """First unfixed arc variable, used arcs before unused ones"""
        fixed = {col for col, _ in fixes}
        order = sorted(range(x.size), key=lambda k: (x[k] < 0.5, k))
        return next((k for k in order if k not in fixed), None)

    def _decompose(self, inst: MilpInstance, lp: LinearProgram, x: np.ndarray) -> List[PlanRoute]:
        succ: Dict[EventNode, List[EventNode]] = defaultdict(list)
        for k, (u, w) in enumerate(lp.arcs):
            if x[k] > 0.5:
                succ[u].append(w)
        for heads in succ.values():
            heads.sort()

        def walk(start: EventNode) -> List[EventNode]:
            path, v = [], start
            for _ in range(len(inst.nodes) + 1):
                if not succ[v]:
                    break
                v = succ[v].pop(0)
                path.append(v)
                if v.is_depot:
                    break
            return path

        plan: List[PlanRoute] = []
        for a in inst.anchors:
            plan.append((a.vehicle, a.node, walk(a.node)))
        anchored = {a.vehicle for a in inst.anchors}
        free = [v for v in range(1, inst.vehicles + 1) if v not in anchored]
        while succ[DEPOT_NODE] and free:
            plan.append((free.pop(0), DEPOT_NODE, walk(DEPOT_NODE)))
        return plan

    # ==================== EVALUATION ====================

    def evaluate(self, inst: MilpInstance, plan: Sequence[PlanRoute]) -> Optional[Evaluation]:
        """Exact objective of a plan with earliest timing, or None if infeasible"""
        arc_index = {arc: k for k, arc in enumerate(inst.arcs)}
        anchors = {a.vehicle: a for a in inst.anchors}
        e0, l0 = inst.window.e0, inst.window.l0
        served: Set[int] = set()
        picked: Set[int] = set()
        times: Dict[EventNode, float] = {}
        routes: List[Route] = []
        cost = regret = 0.0
        used_vehicles = set()

        for vehicle, start, nodes in plan:
            if vehicle in used_vehicles:
                return None
            used_vehicles.add(vehicle)
            anchor = anchors.get(vehicle)
            if anchor is not None and anchor.node != start:
                return None
            if anchor is None and not start.is_depot:
                return None
            if not nodes:
                if anchor is not None:
                    return None
                continue
            if not nodes[-1].is_depot or any(v.is_depot for v in nodes[:-1]):
                return None

            seq = [start] + list(nodes)
            travel = []
            for u, w in zip(seq, seq[1:]):
                k = arc_index.get((u, w))
                if k is None:
                    return None
                cost += inst.arc_cost[k]
                travel.append(inst.arc_time[k])

            events = []
            for pos, v in enumerate(seq):
                if v.is_depot:
                    e, l_ = (max(e0, inst.clock), l0) if pos == 0 else (e0, l0)
                else:
                    e, l_ = inst.earliest[v], inst.latest[v]
                events.append(TimedEvent(v, inst.stop[v], e, l_, inst.service[v]))
            first = events[1]
            events[1] = TimedEvent(first.key, first.stop, max(first.earliest, inst.clock + travel[0]), first.latest, first.service)

            pick_pos = {}
            limits = []
            for pos, v in enumerate(seq[1:], start=1):
                if v.is_depot:
                    continue
                req = inst.requests.get(v.request)
                if req is None:
                    return None
                if v.is_pickup:
                    if v.request in picked or v.request in inst.onboard_pickup:
                        return None
                    picked.add(v.request)
                    pick_pos[v.request] = pos
                    continue
                if v.request in pick_pos:
                    limits.append((pick_pos.pop(v.request), pos, req.service + req.max_ride))
                elif v.request in inst.onboard_pickup:
                    ev = events[pos]
                    cap = inst.onboard_pickup[v.request] + req.service + req.max_ride
                    events[pos] = TimedEvent(ev.key, ev.stop, ev.earliest, min(ev.latest, cap), ev.service)
                else:
                    return None
                if v.request in served:
                    return None
                served.add(v.request)
            if pick_pos:
                return None

            schedule = schedule_service.earliest_schedule(events, travel, limits)
            if schedule is None:
                return None
            stops = []
            for v, ev, b in zip(seq[1:], events[1:], schedule[1:]):
                times[v] = float(b)
                stops.append(ScheduledStop(v, ev.stop, float(b)))
                if v.is_dropoff:
                    regret += float(b) - inst.requests[v.request].e_drop
            routes.append(Route(vehicle=vehicle, stops=stops, start=start))

        for a in inst.anchors:
            if a.vehicle not in used_vehicles:
                return None
        if not set(inst.onboard_pickup) <= served or not inst.fixed_accept <= served or served & inst.fixed_deny:
            return None
        denied = set(inst.requests) - served
        objective = inst.omega1 * cost + inst.omega2 * regret + inst.omega3 * len(denied)
        return Evaluation(objective, cost, regret, served, sorted(routes, key=lambda r: r.vehicle), times)

    def _solution(self, inst, ev: Evaluation, optimal: bool, bound: float, explored: int, status: str) -> SubproblemSolution:
        return SubproblemSolution(
            accepted=set(ev.served),
            denied=set(inst.requests) - ev.served,
            routes=ev.routes,
            service_start=ev.times,
            objective=ev.objective,
            routing_cost=ev.routing_cost,
            regret=ev.regret,
            optimal=optimal,
            bound=bound,
            nodes_explored=explored,
            status=status,
        )

    # ==================== EXPORT ====================

    def write_lp(self, lp: LinearProgram, path: Union[str, Path]) -> Path:
        """Plain-text LP dump (CPLEX LP layout) for debugging"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)

        def expr(coeffs) -> str:
            terms = [f"{'+' if v >= 0 else '-'} {abs(v):.10g} {lp.names[k]}" for k, v in coeffs if v != 0]
            return " ".join(terms) if terms else "0"

        lines = ["\\ routing subproblem", "Minimize", f" obj: {expr(enumerate(lp.c))} + {lp.constant:.10g}", "Subject To"]
        for tag, A, b, sense in (("u", lp.A_ub, lp.b_ub, "<="), ("e", lp.A_eq, lp.b_eq, "=")):
            if A is None:
                continue
            for k in range(A.shape[0]):
                row = A.getrow(k)
                lines.append(f" {tag}{k}: {expr(zip(row.indices, row.data))} {sense} {b[k]:.10g}")
        lines.append("Bounds")
        lines += [f" {lo:.10g} <= {name} <= {hi:.10g}" for name, lo, hi in zip(lp.names, lp.lb, lp.ub)]
        lines.append("Binaries")
        lines += [f" {lp.names[k]}" for k in range(lp.n_arcs)]
        lines.append("End")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path


# Global subproblem solver instance
subproblem_solver = SubproblemSolver()
