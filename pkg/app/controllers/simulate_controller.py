"""
Simulate Controller
===================
Samples weekly request scenarios from fitted models and sizes the fleet.

USAGE:
-----
    run.py simulate --models models/ --out scenarios/ [--weeks 30] [--seed 1]

OUTPUTS:
-------
    weekNN_<Day>.csv   - one evening per file, clock rebased to 22:00,
                         written even when the evening has no requests
    fleet_plan.csv     - scenario A/B/C fleet sizes per weekday
    run_config.yaml    - effective configuration
"""

import argparse

from ..models.demand import GroupSizeDistribution, ScenarioConfig
from ..services.demand_service import demand_service
from ..services.fleet_service import FleetService
from ..services.regression_service import RegressionService
from ..utils.errors import MissingModelError
from ..utils.logger import logger
from ..views.csv_view import CsvView
from .context import CommandContext


def register(subparsers) -> None:
    parser = subparsers.add_parser("simulate", help="sample request scenarios and size the fleet")
    parser.add_argument("--models", required=True, help="directory of fitted stop models")
    parser.add_argument("--out", required=True, help="directory for scenario CSVs")
    parser.add_argument("--weeks", type=int, help="number of weeks (default: demand.weeks)")
    parser.add_argument("--seed", type=int, help="sampling seed (default: demand.seed)")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace, ctx: CommandContext) -> dict:
    cfg = ctx.cfg
    models = RegressionService(cfg.regression).load_models(args.models)
    if not models:
        raise MissingModelError(f"no stop models found in {args.models}")
    weeks = args.weeks or cfg.demand.weeks
    seed = cfg.demand.seed if args.seed is None else args.seed
    dist = GroupSizeDistribution(probs=cfg.demand.group_size_probs)
    out = ctx.output_dir(args.out)

    sampled = []
    files = 0
    for week in range(weeks):
        scenario = ScenarioConfig(
            stops=sorted(models),
            service_hours=cfg.demand.service_hours,
            holidays=cfg.demand.holidays,
            seed=seed,
            week=week,
            intensity_scale=cfg.demand.intensity_scale,
            delta_s=int(round(cfg.horizon.delta_s)),
            capacity=cfg.requests.capacity,
            destination_resamples=cfg.demand.destination_resamples,
        )
        records = demand_service.generate_scenario(scenario, models, dist)
        sampled.append(records)
        evenings = demand_service.split_evenings(records)
        for evening in range(7):
            frame = demand_service.scenario_frame(evenings.get(evening, []))
            CsvView.write(frame, out / demand_service.scenario_filename(week, evening), ctx.config_hash)
            files += 1

    fleet = FleetService(cfg.fleet)
    plans = fleet.fleet_plans(fleet.max_avg_hourly(sampled, cfg.demand.service_hours))
    frame = fleet.plans_frame(plans)
    CsvView.write(frame, out / "fleet_plan.csv", ctx.config_hash)
    ctx.write_provenance(out)

    logger.info(f"Wrote {files} scenario files for {weeks} weeks to {out}")
    return {
        "output_dir": str(out),
        "weeks": weeks,
        "files": files,
        "requests": sum(len(r) for r in sampled),
        "fleet": {p.weekday: p.scenario_a for p in plans},
    }
