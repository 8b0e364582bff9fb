"""
Generate Controller
===================
Writes a complete synthetic input set for the pipeline.

USAGE:
-----
    run.py generate --out data/ [--weeks 26] [--seed 5]

OUTPUTS:
-------
    stops.csv              - stop coordinates, depot included
    truth_models/          - ground-truth demand models per stop
    trip_log.csv           - passenger log drawn from the truth models
    trips.csv              - synthetic bus timetable
    bus_log.csv            - one week of requests carried by the timetable
    run_config.yaml        - effective configuration
"""

import argparse

from ..models.demand import GroupSizeDistribution, ScenarioConfig
from ..services.bus_service import BusService
from ..services.demand_service import demand_service
from ..services.network_service import NetworkService
from ..services.regression_service import RegressionService
from ..services.synthetic_service import synthetic_service
from ..utils.logger import logger
from ..views.csv_view import CsvView
from .context import CommandContext


def register(subparsers) -> None:
    parser = subparsers.add_parser("generate", help="write a synthetic network, trip log and timetable")
    parser.add_argument("--out", help="output directory (default: pipeline.output_dir)")
    parser.add_argument("--weeks", type=int, help="weeks of passenger log (default: pipeline.log_weeks)")
    parser.add_argument("--seed", type=int, help="seed for models and log (default: demand.seed)")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace, ctx: CommandContext) -> dict:
    cfg = ctx.cfg
    out = ctx.output_dir(args.out)
    weeks = args.weeks or cfg.pipeline.log_weeks
    seed = cfg.demand.seed if args.seed is None else args.seed
    dist = GroupSizeDistribution(probs=cfg.demand.group_size_probs)

    network_service = NetworkService(cfg.network)
    net = network_service.build_synthetic_network()
    network_service.save_network(net, out)

    truth = synthetic_service.build_ground_truth_models(net, seed, cfg.pipeline.peak_requests, dist)
    RegressionService(cfg.regression).save_models(truth.values(), out / "truth_models")

    log = synthetic_service.generate_trip_log(truth, weeks, seed)
    CsvView.write(log, out / "trip_log.csv", ctx.config_hash)

    bus = BusService(cfg.bus)
    trips = synthetic_service.build_synthetic_timetable(
        net, settings=cfg.bus, service_end_min=cfg.requests.service_end_min
    )
    CsvView.write(trips, out / "trips.csv", ctx.config_hash)
    timetable = bus.timetable_from_frame(trips)

    week = demand_service.generate_scenario(
        ScenarioConfig(
            stops=list(net.stops),
            service_hours=cfg.demand.service_hours,
            holidays=cfg.demand.holidays,
            seed=seed,
            week=0,
            intensity_scale=cfg.demand.intensity_scale,
            delta_s=int(round(cfg.horizon.delta_s)),
            capacity=cfg.requests.capacity,
            destination_resamples=cfg.demand.destination_resamples,
        ),
        truth,
        dist,
    )
    bus_trips = synthetic_service.generate_bus_log(week, timetable)
    bus.save_bus_log(bus_trips, out / "bus_log.csv")
    ctx.write_provenance(out)

    logger.info(f"Synthetic inputs written to {out}")
    return {
        "output_dir": str(out),
        "stops": len(net.stops),
        "log_rows": len(log),
        "passengers": int(log["count"].sum()) if len(log) else 0,
        "timetable_trips": int(trips["trip_id"].nunique()) if len(trips) else 0,
        "bus_trips": len(bus_trips),
    }
