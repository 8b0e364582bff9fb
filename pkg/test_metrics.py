"""
Metrics, Fleet and Bus Tests
============================
1. Trip outcomes and quality reports
2. Weekday comparison of ridepooling and bus
3. Fleet sizing scenarios A, B and C
4. Timetable waits and bus-side outcomes

Run: pytest test_metrics.py
"""

import math

import numpy as np
import pandas as pd
import pytest

from app.config import BusConfig, FleetConfig
from app.models.bus import BusTrip
from app.models.demand import RequestRecord
from app.models.request import Request
from app.services.bus_service import BusService
from app.services.fleet_service import FleetService
from app.services.metrics_service import MetricsService
from app.utils.constants import SECONDS_PER_DAY, WEEKDAYS
from app.utils.errors import EmptyAcceptedSetError, NoConnectionError, ReportMismatchError, SchemaError


@pytest.fixture
def metrics():
    return MetricsService()


@pytest.fixture
def bus():
    return BusService(BusConfig())


@pytest.fixture
def ten_minute_trip():
    """Direct travel time of 10 minutes, earliest pick-up at minute 10"""
    return Request(id=1, pickup_stop=1, dropoff_stop=2, group_size=1, reveal_time=9.25,
                   e_pick=10.0, l_pick=35.0, e_drop=20.75, l_drop=65.75, service=0.75,
                   max_ride=20.0, t_direct=10.0)


# ==================== OUTCOMES ====================

def test_worked_trip(metrics, ten_minute_trip):
    outcome = metrics.trip_outcome(ten_minute_trip, pickup=15.0, arrival=25.75)
    assert outcome.wait == pytest.approx(5.0)
    assert outcome.ride == pytest.approx(10.0)
    assert outcome.transport == pytest.approx(15.75)
    assert outcome.regret == pytest.approx(5.0)
    assert outcome.departure_time == pytest.approx(15.75)

    report = metrics.summarize([outcome], [1], {1: 1}, routing_cost=4.2)
    assert report.avg_regret == pytest.approx(5.0)
    assert report.total_routing_cost == 4.2
    assert report.pct_denied == 0.0


def test_denied_requests_leave_averages_undefined(metrics, ten_minute_trip, unit_time_network):
    outcome = metrics.trip_outcome(ten_minute_trip, None, None)
    assert not outcome.accepted
    report = metrics.summarize([outcome], [1], {1: 0}, routing_cost=0.0)
    assert report.n_accepted == 0
    assert report.pct_denied == 100.0
    assert report.avg_wait is None and report.avg_transport is None
    with pytest.raises(EmptyAcceptedSetError):
        metrics.compute_report([outcome], [ten_minute_trip], {1: 0}, [], unit_time_network)
    with pytest.raises(ReportMismatchError):
        metrics.summarize([outcome], [1], {1: 1}, routing_cost=0.0)


def test_check_reports(metrics, ten_minute_trip):
    outcome = metrics.trip_outcome(ten_minute_trip, 15.0, 25.75)
    report = metrics.summarize([outcome], [1], {1: 1}, 1.0)
    metrics.check_reports(report, report.model_copy())
    with pytest.raises(ReportMismatchError):
        metrics.check_reports(report, report.model_copy(update={"avg_wait": 5.1}))


# ==================== COMPARISON ====================

def report_rows(days, scale=1.0):
    return pd.DataFrame([
        {"day": day, "vehicles": 4, "total_routing_cost": 100.0, "pct_denied": 2.0,
         "avg_regret": 5.0 * scale, "avg_wait": 4.0 * scale, "avg_ride": 9.0 * scale, "avg_transport": 13.0 * scale}
        for day in days
    ])


def test_identical_reports_compare_to_one(metrics):
    frame = report_rows(["Mon", "Tue"])
    table = metrics.compare_reports(frame, frame)
    assert list(table["day"]) == ["Mon", "Tue"]
    for column in ("avg_regret_ratio", "avg_wait_ratio", "avg_ride_ratio", "avg_transport_ratio"):
        assert table[column].tolist() == [1.0, 1.0]


def test_ratio_is_bus_over_pool(metrics):
    table = metrics.compare_reports(report_rows(["Sat"]), report_rows(["Sat"], scale=3.0))
    assert table.loc[0, "avg_wait_ratio"] == pytest.approx(3.0)
    zero = report_rows(["Sat"], scale=0.0)
    assert math.isnan(metrics.compare_reports(zero, report_rows(["Sat"])).loc[0, "avg_ride_ratio"])


def test_reports_must_cover_the_same_days(metrics):
    with pytest.raises(SchemaError):
        metrics.compare_reports(report_rows(["Mon"]), report_rows(["Tue"]))
    with pytest.raises(SchemaError):
        metrics.daily_summary(pd.DataFrame({"day": ["Mon"]}))


def test_daily_summary_averages_in_weekday_order(metrics):
    frame = pd.concat([report_rows(["Sun"]), report_rows(["Mon"]), report_rows(["Mon"], scale=3.0)])
    summary = metrics.daily_summary(frame)
    assert list(summary["day"]) == ["Mon", "Sun"]
    assert summary.loc[0, "avg_wait"] == pytest.approx(8.0)


def test_report_files(metrics, tmp_path):
    path = metrics.save_frame(report_rows(WEEKDAYS), tmp_path / "reports" / "pool.csv")
    assert len(metrics.load_report(path)) == 7
    broken = tmp_path / "broken.csv"
    pd.DataFrame({"day": ["Mon"]}).to_csv(broken, index=False)
    with pytest.raises(SchemaError):
        metrics.load_report(broken)


# ==================== FLEET ====================

@pytest.mark.parametrize("day, peak, a", [
    ("Mon", 37.2, 5), ("Tue", 34.6, 5), ("Wed", 26.7, 4), ("Thu", 30.8, 4),
    ("Fri", 24.1, 4), ("Sat", 17.9, 3), ("Sun", 26.5, 4),
])
def test_fleet_scenarios(day, peak, a):
    plan = FleetService(FleetConfig()).fleet_plan(day, peak)
    assert (plan.scenario_a, plan.scenario_b, plan.scenario_c) == (a, a - 1, a + 1)
    assert plan.vehicles("b") == a - 1


def test_fleet_never_drops_below_one_vehicle():
    fleet = FleetService(FleetConfig())
    assert fleet.size_fleet(0.0) == 1
    plan = fleet.fleet_plan("Sat", 3.0)
    assert (plan.scenario_a, plan.scenario_b, plan.scenario_c) == (1, 1, 2)
    with pytest.raises(ValueError):
        fleet.size_fleet(-1.0)


def steady_week(per_hour: int):
    """`per_hour` requests between 22:30 and 23:00 on every evening"""
    records = []
    for evening in range(7):
        for k in range(per_hour):
            t = evening * SECONDS_PER_DAY + 1800 + k
            records.append(RequestRecord(request_id=len(records) + 1, submission_time_s=t - 45,
                                         pickup_stop=1, dropoff_stop=2, group_size=1, earliest_pickup_s=t))
    return records


def test_max_average_hourly_requests(tmp_path):
    fleet = FleetService(FleetConfig())
    hours = [22, 23, 0, 1, 2, 3]
    maxima = fleet.max_avg_hourly([steady_week(8), steady_week(8)], hours)
    assert maxima == {day: 8.0 for day in WEEKDAYS}
    assert fleet.max_avg_hourly([steady_week(6), steady_week(10)], hours)["Wed"] == 8.0

    plans = fleet.fleet_plans(maxima)
    path = fleet.save_plans(plans, tmp_path / "fleet.csv")
    loaded = fleet.load_plans(path)
    assert loaded["Mon"] == plans[0]
    assert loaded["Sun"].scenario_a == 1


def test_requests_outside_service_hours_are_rejected():
    late = RequestRecord(request_id=1, submission_time_s=7 * 3600, pickup_stop=1, dropoff_stop=2,
                         group_size=1, earliest_pickup_s=7 * 3600 + 45)
    with pytest.raises(SchemaError):
        FleetService(FleetConfig()).hourly_counts([late], [22, 23, 0, 1, 2, 3])


# ==================== BUS ====================

@pytest.fixture
def timetable(bus):
    trips = pd.DataFrame({
        "trip_id": ["a", "a", "b", "b", "c", "c"],
        "seq": [1, 2, 1, 2, 1, 2],
        "stop_id": [1, 2, 1, 2, 1, 2],
        "time_s": [0, 600, 3600, 4200, 10800, 11400],
    })
    return bus.timetable_from_frame(trips)


@pytest.mark.parametrize("boarding, expected", [(60.0, 60.0), (180.0, 120.0), (0.0, 120.0)])
def test_max_wait(bus, timetable, boarding, expected):
    assert bus.max_wait(timetable, 1, 2, boarding) == pytest.approx(expected)


def test_unserved_pairs(bus, timetable):
    assert timetable.serves(1, 2) and not timetable.serves(2, 1)
    with pytest.raises(NoConnectionError):
        bus.max_wait(timetable, 2, 1, 60.0)


def test_timetable_times_must_increase(bus):
    trips = pd.DataFrame({"trip_id": ["a", "a"], "seq": [1, 2], "stop_id": [1, 2], "time_s": [600, 600]})
    with pytest.raises(SchemaError):
        bus.timetable_from_frame(trips)


def test_sampled_waits(bus):
    rng = np.random.default_rng(41)
    assert bus.sample_wait(0.0, rng) == 0.0
    draws = np.array([bus.sample_wait(60.0, rng) for _ in range(10_000)])
    assert draws.mean() == pytest.approx(30.0, abs=0.6)
    assert draws.min() >= 0.0 and draws.max() <= 60.0


def test_bus_trip_outcome(bus, unit_time_network):
    trip = BusTrip(origin_stop=1, dest_stop=2, boarding_time=60.0, arrival_time=61.75)
    outcome = bus.bus_trip_outcome(1, trip, wait=0.0, net=unit_time_network)
    assert outcome.regret == pytest.approx(0.0)
    assert outcome.ride == pytest.approx(1.0)

    waited = bus.bus_trip_outcome(2, trip, wait=12.0, net=unit_time_network)
    assert waited.transport == pytest.approx(waited.wait + 0.75 + waited.ride)
    assert waited.regret == pytest.approx(12.0)


def test_bus_trip_must_arrive_after_boarding(bus, tmp_path):
    with pytest.raises(ValueError):
        BusTrip(origin_stop=1, dest_stop=2, boarding_time=60.0, arrival_time=60.0)
    log = tmp_path / "bus_log.csv"
    pd.DataFrame({"origin": [1], "dest": [2], "B_s": [3600], "A_s": [3600]}).to_csv(log, index=False)
    with pytest.raises(SchemaError):
        bus.load_bus_log(log)


def test_bus_report_by_weekday(bus, timetable, unit_time_network, tmp_path):
    trips = [
        BusTrip(origin_stop=1, dest_stop=2, boarding_time=60.0, arrival_time=70.0, evening=0),
        BusTrip(origin_stop=1, dest_stop=2, boarding_time=180.0, arrival_time=190.0, evening=1),
        BusTrip(origin_stop=2, dest_stop=1, boarding_time=200.0, arrival_time=210.0, evening=1),
    ]
    report, outcomes = bus.bus_report(trips, timetable, unit_time_network, seed=3)
    assert len(outcomes) == 2
    assert report.n_accepted == 2 and report.total_routing_cost == 0.0
    assert bus.bus_report(trips, timetable, unit_time_network, seed=3)[0] == report

    frame = bus.weekday_frame(trips, timetable, unit_time_network, seed=3)
    assert list(frame["day"]) == ["Mon", "Tue"]
    assert (frame["vehicles"] == 0).all()

    path = bus.save_bus_log(trips, tmp_path / "bus.csv")
    assert bus.load_bus_log(path) == trips
