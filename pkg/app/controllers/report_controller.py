"""
Report Controller
=================
Builds report tables that the other commands do not write themselves.

USAGE:
-----
    run.py report --bus-log data/bus_log.csv --trips data/trips.csv --out bus/
        -> bus_report.csv, one row per weekday with simulated waiting times
    run.py report --pool results/report.csv --out summary/
        -> pool_summary.csv, per-weekday means over all solved evenings

Both modes may be combined in one call.
"""

import argparse

from ..services.bus_service import BusService
from ..services.metrics_service import metrics_service
from ..utils.errors import SchemaError
from ..utils.logger import logger
from ..views.csv_view import CsvView
from .context import CommandContext


def register(subparsers) -> None:
    parser = subparsers.add_parser("report", help="bus baseline and per-weekday summaries")
    parser.add_argument("--bus-log", help="bus log CSV (origin, dest, B_s, A_s[, evening])")
    parser.add_argument("--trips", help="timetable trips CSV, required with --bus-log")
    parser.add_argument("--pool", help="report.csv written by solve")
    parser.add_argument("--seed", type=int, help="waiting-time seed (default: bus.seed)")
    parser.add_argument("--out", help="output directory (default: pipeline.output_dir)")
    parser.add_argument("--stops", help="stops CSV (default: configured or synthetic network)")
    parser.add_argument("--costs", help="cost matrix CSV")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace, ctx: CommandContext) -> dict:
    if not (args.bus_log or args.pool):
        raise SchemaError("report needs --bus-log and/or --pool")
    out = ctx.output_dir(args.out)
    result = {"output_dir": str(out)}

    if args.bus_log:
        if not args.trips:
            raise SchemaError("--bus-log needs the timetable given by --trips")
        bus = BusService(ctx.cfg.bus)
        net = ctx.network(args.stops, args.costs)
        frame = bus.weekday_frame(bus.load_bus_log(args.bus_log), bus.load_timetable(args.trips), net, args.seed)
        result["bus_report"] = str(CsvView.write(frame, out / "bus_report.csv", ctx.config_hash))
        result["bus"] = CsvView.preview(frame)
        logger.info(f"Bus report for {len(frame)} weekdays")

    if args.pool:
        summary = metrics_service.daily_summary(metrics_service.load_report(args.pool))
        result["pool_summary"] = str(CsvView.write(summary, out / "pool_summary.csv", ctx.config_hash))
        result["pool"] = CsvView.preview(summary)

    ctx.write_provenance(out)
    return result
