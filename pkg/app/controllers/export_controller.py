"""
Export Controller
Station summary of a scenario as JSON for map viewers

USAGE:
    run.py export --scenario scenarios/week00_Mon.csv --out map.json [--weekday Mon] [--hour 23] [--holiday false]
"""

import argparse
from pathlib import Path

import yaml

from ..models.calendar import Weekday
from ..services.demand_service import demand_service
from ..services.export_service import export_service
from ..utils.constants import WEEKDAYS
from .context import CommandContext, day_of


def _flag(text: str) -> bool:
    value = yaml.safe_load(text)
    if not isinstance(value, bool):
        raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")
    return value


def register(subparsers) -> None:
    parser = subparsers.add_parser("export", help="export station boardings as JSON")
    parser.add_argument("--scenario", required=True, help="scenario CSV")
    parser.add_argument("--out", required=True, help="JSON file")
    parser.add_argument("--weekday", type=lambda v: int(Weekday.parse(v)), help="Mon..Sun")
    parser.add_argument("--hour", type=int, choices=range(24), metavar="0..23", help="pick-up hour")
    parser.add_argument("--holiday", type=_flag, help="true or false")
    parser.add_argument("--stops", help="stops CSV (default: configured or synthetic network)")
    parser.add_argument("--costs", help="cost matrix CSV")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace, ctx: CommandContext) -> dict:
    net = ctx.network(args.stops, args.costs)
    records = demand_service.load_scenario(args.scenario)
    document = export_service.export_scenario_json(
        records,
        net,
        args.weekday,
        args.hour,
        args.holiday,
        ctx.cfg.demand.holidays,
        first_evening=WEEKDAYS.index(day_of(Path(args.scenario), WEEKDAYS[0])),
    )
    document["config_hash"] = ctx.config_hash
    path = export_service.save_json(document, args.out)
    return {"export": str(path), "requests": document["n_requests"], "passengers": document["n_passengers"]}
