"""
Compare Controller
Bus versus ridepooling, side by side per weekday

USAGE:
    run.py compare --pool results/report.csv --bus bus/bus_report.csv --out comparison.csv
"""

import argparse
from pathlib import Path

from ..services.metrics_service import metrics_service
from ..views.csv_view import CsvView
from .context import CommandContext


def register(subparsers) -> None:
    parser = subparsers.add_parser("compare", help="compare pool and bus reports per weekday")
    parser.add_argument("--pool", required=True, help="report.csv written by solve")
    parser.add_argument("--bus", required=True, help="bus report written by `report --bus-log`")
    parser.add_argument("--out", required=True, help="comparison CSV")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace, ctx: CommandContext) -> dict:
    pool = metrics_service.load_report(args.pool)
    bus = metrics_service.load_report(args.bus)
    table = metrics_service.compare_reports(pool, bus)
    path = CsvView.write(table, Path(args.out), ctx.config_hash)
    ratios = {
        row["day"]: {c: row[c] for c in table.columns if c.endswith("_ratio")}
        for row in table.to_dict("records")
    }
    return {"comparison": str(path), "ratios": ratios}
