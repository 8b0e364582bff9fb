"""
Command Line Tests
==================
1. generate -> fit -> simulate -> solve on a small synthetic city
2. Exit codes for input and solver errors
3. --set overrides beat environment variables, which beat config.yaml
4. compare, report and export on hand-made inputs

Run: pytest test_cli.py
"""

import json

import pandas as pd
import pytest
import yaml

from app.config import apply_overrides, load_config
from app.controllers import solve_controller
from app.main import main
from app.models.demand import RequestRecord
from app.services.demand_service import demand_service
from app.services.metrics_service import metrics_service
from app.utils.constants import EXIT_INPUT_ERROR, EXIT_OK, EXIT_SOLVER_ERROR, WEEKDAYS
from app.utils.errors import InfeasibleError


@pytest.fixture
def cli(tmp_path, capsys):
    """Run a command against a small configuration; returns (exit code, JSON document)"""
    overrides = [
        f"logging.file={tmp_path / 'logs' / 'app.log'}",
        "logging.console=false",
        "network.n_stops=6",
        "network.extent_km=4.0",
        "pipeline.peak_requests=30.0",
        "demand.intensity_scale=0.2",
        "bus.n_lines=3",
        "solver.time_limit_s=5.0",
    ]

    def run(*args, sets=()):
        argv = ["--config", str(tmp_path / "missing.yaml")]
        for item in [*overrides, *sets]:
            argv += ["--set", item]
        code = main(argv + list(args))
        return code, json.loads(capsys.readouterr().out)

    return run


def scenario_file(directory, name="week00_Mon.csv"):
    records = [
        RequestRecord(request_id=1, submission_time_s=1155, pickup_stop=1, dropoff_stop=2,
                      group_size=1, earliest_pickup_s=1200),
        RequestRecord(request_id=2, submission_time_s=2955, pickup_stop=3, dropoff_stop=4,
                      group_size=2, earliest_pickup_s=3000),
        RequestRecord(request_id=3, submission_time_s=4000, pickup_stop=1, dropoff_stop=5,
                      group_size=1, earliest_pickup_s=4045),
    ]
    return demand_service.save_scenario(records, directory / name)


def report_csv(path, days, wait=4.0):
    frame = pd.DataFrame([
        {"day": day, "vehicles": 3, "total_routing_cost": 80.0, "pct_denied": 1.0,
         "avg_regret": 6.0, "avg_wait": wait, "avg_ride": 8.0, "avg_transport": 12.75}
        for day in days
    ])
    return metrics_service.save_frame(frame, path)


# ==================== PIPELINE ====================

@pytest.mark.slow
def test_full_pipeline(cli, tmp_path):
    data, models, scenarios, results = (tmp_path / d for d in ("data", "models", "scenarios", "results"))

    code, doc = cli("generate", "--out", str(data), "--weeks", "8", "--seed", "5")
    assert code == EXIT_OK, doc
    assert doc["data"]["stops"] == 6
    for name in ("stops.csv", "trip_log.csv", "trips.csv", "bus_log.csv", "run_config.yaml"):
        assert (data / name).exists()

    code, doc = cli("fit", "--log", str(data / "trip_log.csv"), "--out", str(models))
    assert code == EXIT_OK, doc
    assert doc["data"]["stops_fitted"] >= 1
    assert (models / "fit_summary.csv").exists()

    code, doc = cli("simulate", "--models", str(models), "--out", str(scenarios), "--weeks", "1")
    assert code == EXIT_OK, doc
    assert doc["data"]["files"] == 7
    assert sorted(p.name for p in scenarios.glob("week00_*.csv")) == sorted(f"week00_{d}.csv" for d in WEEKDAYS)
    assert (scenarios / "fleet_plan.csv").exists()

    code, doc = cli("solve", "--scenario", str(scenarios / "week00_Sat.csv"), "--vehicles", "2",
                    "--out", str(results))
    assert code == EXIT_OK, doc
    report = pd.read_csv(results / "report.csv")
    assert list(report["day"]) == ["Sat"]
    assert report["config_hash"].nunique() == 1
    assert (results / "week00_Sat_events.jsonl").exists()
    meta = json.loads((results / "week00_Sat_events.jsonl").read_text().splitlines()[0])
    assert meta["config_hash"] == doc["config_hash"]


def test_solve_single_scenario(cli, tmp_path):
    path = scenario_file(tmp_path)
    code, doc = cli("solve", "--scenario", str(path), "--vehicles", "2", "--out", str(tmp_path / "out"))
    assert code == EXIT_OK, doc
    report = metrics_service.load_report(tmp_path / "out" / "report.csv")
    assert report.loc[0, "day"] == "Mon"
    assert report.loc[0, "vehicles"] == 2
    assert (tmp_path / "out" / "week00_Mon_routes.csv").exists()
    assert (tmp_path / "out" / "week00_Mon_hourly.csv").exists()
    assert (tmp_path / "out" / "run_config.yaml").exists()


# ==================== CONFIGURATION ====================

def test_override_precedence(tmp_path, monkeypatch):
    path = tmp_path / "config.yaml"
    path.write_text("solver:\n  time_limit_s: 7.0\n  node_limit: 50\n", encoding="utf-8")
    assert load_config(str(path)).solver.time_limit_s == 7.0

    monkeypatch.setenv("RIDEPOOL_SOLVER__TIME_LIMIT_S", "12.0")
    loaded = load_config(str(path))
    assert loaded.solver.time_limit_s == 12.0
    assert loaded.solver.node_limit == 50

    overridden = apply_overrides(loaded, ["solver.time_limit_s=3.5"])
    assert overridden.solver.time_limit_s == 3.5
    assert overridden.solver.node_limit == 50


def test_set_flag_wins_over_environment(cli, tmp_path, monkeypatch):
    monkeypatch.setenv("RIDEPOOL_SOLVER__OMEGA3", "0.0")
    code, doc = cli("solve", "--scenario", str(scenario_file(tmp_path)), "--vehicles", "2",
                    "--out", str(tmp_path / "out"), sets=["solver.omega3=250.0"])
    assert code == EXIT_OK, doc
    effective = yaml.safe_load((tmp_path / "out" / "run_config.yaml").read_text(encoding="utf-8"))
    assert effective["solver"]["omega3"] == 250.0


# ==================== EXIT CODES ====================

def test_bad_override_is_an_input_error(cli, tmp_path):
    code, doc = cli("fit", "--log", "x.csv", "--out", str(tmp_path / "models"), sets=["network.bogus=1"])
    assert code == EXIT_INPUT_ERROR
    assert doc["message"] == "invalid configuration"
    code, _ = cli("fit", "--log", "x.csv", "--out", str(tmp_path / "models"), sets=["network.n_stops=many"])
    assert code == EXIT_INPUT_ERROR


def test_missing_log(cli, tmp_path):
    code, doc = cli("fit", "--log", str(tmp_path / "nothing.csv"), "--out", str(tmp_path / "models"))
    assert code == EXIT_INPUT_ERROR
    assert doc["error"] is True


def test_empty_log_writes_nothing(cli, tmp_path):
    log = tmp_path / "trip_log.csv"
    log.write_text("date,weekday,hour,holiday,origin_stop,dest_stop,count\n")
    code, doc = cli("fit", "--log", str(log), "--out", str(tmp_path / "models"))
    assert code == EXIT_INPUT_ERROR
    assert "empty" in doc["message"]
    assert not (tmp_path / "models").exists()


def test_solver_failure_exit_code(cli, tmp_path, monkeypatch):
    def broken(*args, **kwargs):
        raise InfeasibleError("no feasible routing found for the subproblem")

    monkeypatch.setattr(solve_controller.horizon_service, "run", broken)
    code, doc = cli("solve", "--scenario", str(scenario_file(tmp_path)), "--vehicles", "1",
                    "--out", str(tmp_path / "out"))
    assert code == EXIT_SOLVER_ERROR
    assert doc["code"]


def test_unknown_weekday_needs_day_flag(cli, tmp_path):
    path = scenario_file(tmp_path, name="evening.csv")
    code, _ = cli("solve", "--scenario", str(path), "--vehicles", "1", "--out", str(tmp_path / "out"))
    assert code == EXIT_INPUT_ERROR
    code, _ = cli("solve", "--scenario", str(path), "--vehicles", "1", "--day", "Wed",
                  "--out", str(tmp_path / "out"))
    assert code == EXIT_OK


# ==================== REPORTS ====================

def test_compare(cli, tmp_path):
    pool = report_csv(tmp_path / "pool.csv", ["Mon", "Tue"])
    bus = report_csv(tmp_path / "bus.csv", ["Mon", "Tue"], wait=12.0)
    code, doc = cli("compare", "--pool", str(pool), "--bus", str(bus), "--out", str(tmp_path / "cmp.csv"))
    assert code == EXIT_OK, doc
    assert doc["data"]["ratios"]["Mon"]["avg_wait_ratio"] == pytest.approx(3.0)
    assert doc["data"]["ratios"]["Tue"]["avg_ride_ratio"] == pytest.approx(1.0)

    other = report_csv(tmp_path / "sat.csv", ["Sat"])
    code, _ = cli("compare", "--pool", str(pool), "--bus", str(other), "--out", str(tmp_path / "bad.csv"))
    assert code == EXIT_INPUT_ERROR


def test_report_pool_summary(cli, tmp_path):
    pool = report_csv(tmp_path / "pool.csv", ["Wed", "Mon", "Mon"])
    code, doc = cli("report", "--pool", str(pool), "--out", str(tmp_path / "summary"))
    assert code == EXIT_OK, doc
    summary = pd.read_csv(tmp_path / "summary" / "pool_summary.csv")
    assert list(summary["day"]) == ["Mon", "Wed"]

    code, _ = cli("report", "--out", str(tmp_path / "summary"))
    assert code == EXIT_INPUT_ERROR


def test_export(cli, tmp_path):
    path = scenario_file(tmp_path)
    out = tmp_path / "map.json"
    code, doc = cli("export", "--scenario", str(path), "--out", str(out))
    assert code == EXIT_OK, doc
    assert doc["data"]["requests"] == 3
    assert doc["data"]["passengers"] == 4
    document = json.loads(out.read_text())
    boardings = {s["id"]: s["boardings"] for s in document["stations"]}
    assert boardings[1] == 2 and boardings[3] == 2
    assert document["config_hash"] == doc["config_hash"]
