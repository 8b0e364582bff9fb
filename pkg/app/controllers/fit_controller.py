"""
Fit Controller
Fits per-stop demand models from a passenger log

USAGE:
    run.py fit --log trip_log.csv --out models/ [--parallel]
"""

import argparse

from ..services.fit_service import FitService
from ..views.csv_view import CsvView
from .context import CommandContext


def register(subparsers) -> None:
    parser = subparsers.add_parser("fit", help="fit Poisson and destination models per stop")
    parser.add_argument("--log", required=True, help="passenger log CSV")
    parser.add_argument("--out", required=True, help="directory for stop_<id>.json and fit_summary.csv")
    parser.add_argument("--parallel", action="store_true", default=None, help="fit stops in a thread pool")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace, ctx: CommandContext) -> dict:
    service = FitService(ctx.cfg.regression)
    log = service.read_log(args.log)
    # Nothing is written unless every stop has been processed
    models, summary = service.fit_log(log, parallel=args.parallel)
    out = ctx.output_dir(args.out)
    service.regression.save_models(models.values(), out)
    CsvView.write(summary, out / "fit_summary.csv", ctx.config_hash)
    ctx.write_provenance(out)
    failed = summary.loc[summary["status"] != "ok", "stop_id"].astype(int).tolist()
    return {
        "output_dir": str(out),
        "stops_fitted": len(models),
        "stops_failed": failed,
        "passengers": int(log["count"].sum()),
    }
