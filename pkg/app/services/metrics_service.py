"""
Metrics Service Module
=======================
Service-quality measures of an evening, computed from route traces.

For an accepted request with pick-up start B, departure D = B + s and
arrival A (start of service at the drop-off):

    wait      = B - e_pick
    ride      = A - D
    transport = A - e_pick
    regret    = A - e_drop

All four are averaged over accepted requests only. Routing cost is the
summed arc cost of the driven routes, depot to depot.

report_from_event_log recomputes the same report from the JSON-lines event
log alone and is kept independent of the trace-based code path.
"""

import math
from collections import defaultdict
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..models.graph import Route
from ..models.network import StopNetwork
from ..models.report import QualityReport, TripOutcome
from ..models.request import Request
from ..models.solution import SubproblemSolution
from ..utils.constants import METRIC_COLUMNS, REPORT_COLUMNS, WEEKDAYS, EventType
from ..utils.errors import EmptyAcceptedSetError, ReportMismatchError, SchemaError
from ..utils.helpers import evening_offset_hours, scenario_hour
from ..utils.logger import logger

HOURLY_COLUMNS = ["hour", "n_requests", "n_accepted", "total_routing_cost", "pct_denied", *METRIC_COLUMNS]


class MetricsService:
    """Trip outcomes and quality reports"""

    # ==================== OUTCOMES ====================

    def trip_outcome(self, req: Request, pickup: Optional[float], arrival: Optional[float]) -> TripOutcome:
        if pickup is None or arrival is None:
            return TripOutcome(request_id=req.id, accepted=False, group_size=req.group_size)
        departure = pickup + req.service
        return TripOutcome(
            request_id=req.id,
            accepted=True,
            group_size=req.group_size,
            pickup_time=pickup,
            departure_time=departure,
            arrival_time=arrival,
            wait=pickup - req.e_pick,
            ride=arrival - departure,
            transport=arrival - req.e_pick,
            regret=arrival - req.e_drop,
        )

    def outcomes_from_routes(self, routes: Iterable[Route], requests: Sequence[Request]) -> List[TripOutcome]:
        pickup: Dict[int, float] = {}
        arrival: Dict[int, float] = {}
        for route in routes:
            for stop in route.stops:
                if stop.node.is_pickup:
                    pickup[stop.node.request] = stop.time
                elif stop.node.is_dropoff:
                    arrival[stop.node.request] = stop.time
        return [self.trip_outcome(r, pickup.get(r.id), arrival.get(r.id)) for r in sorted(requests, key=lambda r: r.id)]

    def outcomes_from_solution(self, solution: SubproblemSolution, requests: Sequence[Request]) -> List[TripOutcome]:
        outcomes = self.outcomes_from_routes(solution.routes, requests)
        served = {o.request_id for o in outcomes if o.accepted}
        if served != set(solution.accepted) & {r.id for r in requests}:
            raise ReportMismatchError("accepted requests and route traces disagree")
        return outcomes

    @staticmethod
    def routing_cost(routes: Iterable[Route], net: StopNetwork) -> float:
        total = 0.0
        for route in routes:
            prev = net.depot
            for stop in route.stops:
                total += net.c(prev, stop.stop)
                prev = stop.stop
        return total

    # ==================== REPORTS ====================

    def compute_report(
        self,
        outcomes: Sequence[TripOutcome],
        requests: Sequence[Request],
        p_star: Mapping[int, int],
        routes: Iterable[Route],
        net: StopNetwork,
    ) -> QualityReport:
        """Raises EmptyAcceptedSetError when no request was accepted"""
        report = self.summarize(outcomes, [r.id for r in requests], p_star, self.routing_cost(routes, net))
        if report.n_accepted == 0:
            raise EmptyAcceptedSetError("no accepted requests; averages are undefined")
        return report

    def summarize(
        self,
        outcomes: Sequence[TripOutcome],
        request_ids: Sequence[int],
        p_star: Mapping[int, int],
        routing_cost: float,
    ) -> QualityReport:
        """Report with averages left as None when nobody was served"""
        by_id = {o.request_id: o for o in outcomes}
        chosen = [rid for rid in request_ids if p_star.get(rid, 0) == 1]
        missing = [rid for rid in chosen if rid not in by_id or not by_id[rid].accepted]
        if missing:
            raise ReportMismatchError(f"accepted requests without a trip outcome: {missing[:10]}")
        accepted = [by_id[rid] for rid in chosen]
        n = len(request_ids)
        averages = {}
        for column, field in zip(METRIC_COLUMNS, ("regret", "wait", "ride", "transport")):
            averages[column] = float(np.mean([getattr(o, field) for o in accepted])) if accepted else None
        return QualityReport(
            n_requests=n,
            n_accepted=len(accepted),
            total_routing_cost=routing_cost,
            pct_denied=100.0 * (1.0 - len(accepted) / n) if n else 0.0,
            **averages,
        )

    def report_from_solution(
        self, solution: SubproblemSolution, requests: Sequence[Request], net: StopNetwork
    ) -> QualityReport:
        outcomes = self.outcomes_from_solution(solution, requests)
        p_star = {r.id: int(r.id in solution.accepted) for r in requests}
        return self.summarize(outcomes, [r.id for r in requests], p_star, self.routing_cost(solution.routes, net))

    def hourly_breakdown(
        self, outcomes: Sequence[TripOutcome], requests: Sequence[Request], routes: Iterable[Route], net: StopNetwork
    ) -> pd.DataFrame:
        """
        One row per wall-clock hour of e_pick. Arc costs are charged to the
        hour in which the arc's head event starts.
        """
        by_id = {o.request_id: o for o in outcomes}
        groups: Dict[int, List[Request]] = defaultdict(list)
        for req in requests:
            groups[scenario_hour(req.e_pick)].append(req)
        costs: Dict[int, float] = defaultdict(float)
        for route in routes:
            prev = net.depot
            for stop in route.stops:
                costs[scenario_hour(stop.time)] += net.c(prev, stop.stop)
                prev = stop.stop

        rows = []
        for hour in sorted(set(groups) | set(costs), key=evening_offset_hours):
            reqs = groups.get(hour, [])
            p_star = {r.id: int(by_id[r.id].accepted) for r in reqs if r.id in by_id}
            report = self.summarize(list(by_id.values()), [r.id for r in reqs], p_star, costs.get(hour, 0.0))
            rows.append({"hour": hour, **report.model_dump()})
        return pd.DataFrame(rows, columns=HOURLY_COLUMNS)

    # ==================== EVENT LOG REPLAY ====================

    def report_from_event_log(self, records: Iterable[dict], net: StopNetwork) -> QualityReport:
        """Recompute the evening report from raw event-log records"""
        revealed: Dict[int, dict] = {}
        pickup: Dict[int, float] = {}
        arrival: Dict[int, float] = {}
        position: Dict[int, int] = {}
        cost = 0.0
        for rec in records:
            kind = rec.get("type")
            if kind == EventType.REVEAL:
                revealed[rec["request"]] = rec
            elif kind == EventType.DEPOT_DEPARTURE:
                position[rec["vehicle"]] = net.depot
            elif kind in (EventType.PICKUP, EventType.DROPOFF, EventType.DEPOT_RETURN):
                vehicle = rec["vehicle"]
                if vehicle not in position:
                    raise SchemaError(f"vehicle {vehicle} moves before leaving the depot")
                cost += net.c(position[vehicle], rec["stop"])
                position[vehicle] = rec["stop"]
                if kind == EventType.PICKUP:
                    pickup[rec["request"]] = rec["time"]
                elif kind == EventType.DROPOFF:
                    arrival[rec["request"]] = rec["time"]

        served = [rid for rid in revealed if rid in pickup and rid in arrival]
        sums = dict.fromkeys(METRIC_COLUMNS, 0.0)
        for rid in served:
            info, b, a = revealed[rid], pickup[rid], arrival[rid]
            sums["avg_wait"] += b - info["e_pick"]
            sums["avg_ride"] += a - (b + info["service"])
            sums["avg_transport"] += a - info["e_pick"]
            sums["avg_regret"] += a - info["e_drop"]
        n, k = len(revealed), len(served)
        return QualityReport(
            n_requests=n,
            n_accepted=k,
            total_routing_cost=cost,
            pct_denied=100.0 * (n - k) / n if n else 0.0,
            **{c: (v / k if k else None) for c, v in sums.items()},
        )

    def check_reports(self, first: QualityReport, second: QualityReport, tol: float = 1e-9) -> None:
        """Raise ReportMismatchError unless both reports agree within tol"""
        a, b = first.model_dump(), second.model_dump()
        for key in a:
            x, y = a[key], b[key]
            if x is None or y is None:
                if x is not y:
                    raise ReportMismatchError(f"{key}: {x} vs {y}")
            elif not math.isclose(x, y, rel_tol=0.0, abs_tol=tol):
                raise ReportMismatchError(f"{key}: {x!r} vs {y!r}")
        logger.debug("Event log replay matches the route-trace report")

    # ==================== COMPARISON ====================

    def daily_summary(self, frame: pd.DataFrame) -> pd.DataFrame:
        """Mean over instances per weekday, in weekday order"""
        missing = [c for c in REPORT_COLUMNS if c not in frame.columns]
        if missing:
            raise SchemaError(f"report lacks columns {missing}")
        numeric = frame[REPORT_COLUMNS].copy()
        grouped = numeric.groupby("day", sort=False)[REPORT_COLUMNS[1:]].mean().reset_index()
        order = {day: k for k, day in enumerate(WEEKDAYS)}
        grouped["_order"] = grouped["day"].map(lambda d: order.get(d, len(order)))
        return grouped.sort_values(["_order", "day"]).drop(columns="_order").reset_index(drop=True)

    def compare_reports(self, pool: pd.DataFrame, bus: pd.DataFrame) -> pd.DataFrame:
        """Side by side per weekday with bus/pool ratios of the four averages"""
        pool_days, bus_days = self.daily_summary(pool), self.daily_summary(bus)
        if set(pool_days["day"]) != set(bus_days["day"]):
            raise SchemaError(
                "pool and bus reports cover different weekdays",
                details=f"pool {sorted(pool_days['day'])}, bus {sorted(bus_days['day'])}",
            )
        merged = pool_days.merge(bus_days[["day", *METRIC_COLUMNS]], on="day", suffixes=("_pool", "_bus"))
        columns = ["day", "vehicles", "total_routing_cost", "pct_denied"]
        for metric in METRIC_COLUMNS:
            pool_value, bus_value = merged[f"{metric}_pool"], merged[f"{metric}_bus"]
            merged[f"{metric}_ratio"] = bus_value / pool_value.where(pool_value != 0)
            columns += [f"{metric}_pool", f"{metric}_bus", f"{metric}_ratio"]
        return merged[columns]

    # ==================== FILES ====================

    def report_row(self, day: str, vehicles: int, report: QualityReport) -> dict:
        data = report.model_dump()
        return {"day": day, "vehicles": vehicles, **{c: data[c] for c in REPORT_COLUMNS[2:]}}

    def report_frame(self, rows: Iterable[dict]) -> pd.DataFrame:
        return pd.DataFrame(list(rows), columns=REPORT_COLUMNS)

    def save_frame(self, frame: pd.DataFrame, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False)
        return path

    def load_report(self, path: Union[str, Path]) -> pd.DataFrame:
        try:
            frame = pd.read_csv(path)
        except (OSError, pd.errors.ParserError) as e:
            raise SchemaError(f"cannot read report {path}", details=str(e))
        missing = [c for c in REPORT_COLUMNS if c not in frame.columns]
        if missing:
            raise SchemaError(f"report {path} lacks columns {missing}")
        return frame


# Global metrics service instance
metrics_service = MetricsService()
