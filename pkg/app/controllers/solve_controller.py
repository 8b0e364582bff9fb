"""
Solve Controller
================
Runs the rolling horizon over scenario files and reports service quality.

USAGE:
-----
    run.py solve --scenario scenarios/ --vehicles 4 --out results/
    run.py solve --scenario scenarios/week00_Mon.csv --fleet scenarios/fleet_plan.csv --fleet-scenario B

OUTPUTS (per scenario file):
---------------------------
    <name>_events.jsonl   - event log, first line holds run metadata
    <name>_routes.csv     - executed route traces
    <name>_hourly.csv     - quality measures per pick-up hour
and for the whole call:
    report.csv            - one row per solved evening (day, vehicles, ...)
    run_config.yaml       - effective configuration

CHECKS:
------
Every evening is re-validated by the route validator and its report is
recomputed from the event log; any disagreement aborts the command.

NOTES:
-----
With pipeline.workers > 1 scenario files are solved in worker processes.
Each run is sequential and seeded, so results do not depend on the worker
count.
"""

import argparse
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional

from ..config import AppConfig
from ..models.horizon import RunConfig
from ..models.report import ValidationParams
from ..services.demand_service import demand_service
from ..services.fleet_service import FleetService
from ..services.horizon_service import horizon_service
from ..services.metrics_service import metrics_service
from ..services.request_service import RequestService
from ..services.validator_service import validator_service
from ..utils.errors import InfeasibleError, SchemaError
from ..utils.logger import logger
from ..views.csv_view import CsvView
from .context import DAY_PATTERN, CommandContext, day_of


def register(subparsers) -> None:
    parser = subparsers.add_parser("solve", help="run the rolling horizon on scenario files")
    parser.add_argument("--scenario", required=True, nargs="+", help="scenario CSVs or directories of them")
    fleet = parser.add_mutually_exclusive_group(required=True)
    fleet.add_argument("--vehicles", type=int, help="fleet size for every evening")
    fleet.add_argument("--fleet", help="fleet_plan.csv written by simulate")
    parser.add_argument("--fleet-scenario", default="A", choices=["A", "B", "C"], help="fleet plan column")
    parser.add_argument("--day", help="weekday for files whose name does not carry one")
    parser.add_argument("--out", help="output directory (default: pipeline.output_dir)")
    parser.add_argument("--stops", help="stops CSV (default: configured or synthetic network)")
    parser.add_argument("--costs", help="cost matrix CSV")
    parser.add_argument("--workers", type=int, help="worker processes (default: pipeline.workers)")
    parser.set_defaults(handler=handle)


def run_config(cfg: AppConfig, vehicles: int) -> RunConfig:
    return RunConfig(
        vehicles=vehicles,
        delta_min=cfg.horizon.delta_s / 60.0,
        omega1=cfg.solver.omega1,
        omega2=cfg.solver.omega2,
        omega3=cfg.solver.omega3,
        heuristic=cfg.heuristic,
        capacity=cfg.requests.capacity,
        max_postpone=cfg.requests.max_postpone_min,
        time_limit_s=cfg.solver.time_limit_s,
        node_limit=cfg.solver.node_limit,
        seed=cfg.horizon.seed,
    )


def scenario_files(paths: List[str]) -> List[Path]:
    files = []
    for item in paths:
        path = Path(item)
        if path.is_dir():
            files.extend(p for p in sorted(path.glob("*.csv")) if DAY_PATTERN.search(p.name))
        elif path.exists():
            files.append(path)
        else:
            raise SchemaError(f"scenario {item} does not exist")
    if not files:
        raise SchemaError("no scenario files found")
    return files


def solve_file(path: Path, vehicles: int, day: str, cfg: AppConfig, out: Path,
               stops: Optional[str] = None, costs: Optional[str] = None) -> List[dict]:
    """Solve every evening of one scenario file; returns report rows"""
    ctx = CommandContext(cfg)
    net = ctx.network(stops, costs)
    requests_service = RequestService(cfg.requests)
    window = requests_service.service_window()
    params = run_config(cfg, vehicles)

    rows = []
    for evening, records in demand_service.split_evenings(demand_service.load_scenario(path)).items():
        name = path.stem if evening == 0 else f"{path.stem}_e{evening}"
        requests = requests_service.derive_all(records, net)
        result = horizon_service.run(requests, params, net, window)

        meta = {"scenario": path.name, "evening": evening, "day": day, "vehicles": vehicles,
                "config_hash": ctx.config_hash}
        log_path = horizon_service.write_event_log(result, out / f"{name}_events.jsonl", meta)
        routes = horizon_service.route_frame(result.solution.routes, cfg.requests.capacity)
        CsvView.write(routes, out / f"{name}_routes.csv", ctx.config_hash)

        records_log = horizon_service.read_event_log(log_path)
        violations = validator_service.validate_routes(
            result.solution.routes,
            requests,
            net,
            ValidationParams(
                capacity=cfg.requests.capacity,
                max_postpone=cfg.requests.max_postpone_min,
                e0=window.e0,
                l0=window.l0,
                promised=validator_service.promised_from_events(records_log),
            ),
            accepted=result.solution.accepted,
        )
        if violations:
            for v in violations[:20]:
                logger.error(f"{name}: {v.kind} (request {v.request}, vehicle {v.vehicle}): {v.message}")
            raise InfeasibleError(f"{name}: final routes violate {len(violations)} constraints")

        report = metrics_service.report_from_solution(result.solution, requests, net)
        metrics_service.check_reports(report, metrics_service.report_from_event_log(records_log, net))

        outcomes = metrics_service.outcomes_from_solution(result.solution, requests)
        hourly = metrics_service.hourly_breakdown(outcomes, requests, result.solution.routes, net)
        CsvView.write(hourly, out / f"{name}_hourly.csv", ctx.config_hash)

        row = metrics_service.report_row(day, vehicles, report)
        row.update({"scenario": name, "solves": result.solves, "optimal": result.solution.optimal})
        rows.append(row)
        logger.info(f"{name}: {report.n_accepted}/{report.n_requests} accepted with {vehicles} vehicles")
    return rows


def handle(args: argparse.Namespace, ctx: CommandContext) -> dict:
    cfg = ctx.cfg
    files = scenario_files(args.scenario)
    out = ctx.output_dir(args.out)
    plans = FleetService(cfg.fleet).load_plans(args.fleet) if args.fleet else None

    jobs = []
    for path in files:
        day = day_of(path, args.day)
        if plans is not None:
            if day not in plans:
                raise SchemaError(f"fleet plan has no entry for {day}")
            vehicles = plans[day].vehicles(args.fleet_scenario)
        else:
            vehicles = args.vehicles
        jobs.append((path, vehicles, day, cfg, out, args.stops, args.costs))

    workers = args.workers or cfg.pipeline.workers
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(solve_file, *zip(*jobs)))
    else:
        results = [solve_file(*job) for job in jobs]

    rows = [row for part in results for row in part]
    frame = metrics_service.report_frame(rows)
    for extra in ("scenario", "solves", "optimal"):
        frame[extra] = [row[extra] for row in rows]
    report_path = CsvView.write(frame, out / "report.csv", ctx.config_hash)
    ctx.write_provenance(out)
    return {
        "output_dir": str(out),
        "report": str(report_path),
        "evenings": len(rows),
        "mean_pct_denied": float(frame["pct_denied"].mean()) if rows else None,
    }
