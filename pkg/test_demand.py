"""
Scenario Sampling Tests
=======================
1. Group sizes and intensity downscaling
2. Elementary samplers (counts, arrival times, destinations)
3. Weekly scenarios: determinism, ordering, evening split, files

Run: pytest test_demand.py
"""

import numpy as np
import pytest
from scipy import stats

from app.config import NetworkConfig
from app.models.calendar import Weekday
from app.models.demand import GroupSizeDistribution, RequestRecord, ScenarioConfig
from app.models.regression import DestinationModel, FitReport, PoissonModel, StopModels
from app.services.demand_service import demand_service
from app.services.network_service import NetworkService
from app.services.synthetic_service import synthetic_service
from app.utils.constants import N_COVARIATES, SECONDS_PER_DAY
from app.utils.errors import MissingModelError, SchemaError

TABLE_PROBS = [0.804, 0.153, 0.026, 0.011, 0.004, 0.002]


@pytest.fixture
def dist():
    return GroupSizeDistribution(probs=TABLE_PROBS)


@pytest.fixture
def small_models():
    net = NetworkService(NetworkConfig(n_stops=6, seed=4)).build_synthetic_network()
    return synthetic_service.build_ground_truth_models(net, seed=8, peak_requests=30.0)


def silent_models(stops):
    """Models whose intensity is numerically zero"""
    report = FitReport(log_likelihood=0.0, iterations=0, converged=True, gradient_norm=0.0)
    models = {}
    for stop in stops:
        dest = [s for s in stops if s != stop]
        models[stop] = StopModels(
            stop_id=stop,
            poisson=PoissonModel(stop_id=stop, beta=[-60.0] + [0.0] * (N_COVARIATES - 1)),
            destination=DestinationModel(stop_id=stop, categories=dest,
                                         theta=np.zeros((len(dest) - 1, N_COVARIATES)).tolist()),
            poisson_report=report,
            destination_report=report,
        )
    return models


# ==================== GROUP SIZES ====================

def test_group_size_mean(dist):
    assert dist.mean == pytest.approx(1.264, abs=1e-12)
    assert dist.max_size == 6


def test_group_size_distribution_must_sum_to_one():
    with pytest.raises(ValueError):
        GroupSizeDistribution(probs=[0.5, 0.4])
    with pytest.raises(ValueError):
        GroupSizeDistribution(probs=[0.1] * 10)


def test_downscale_intensity(dist):
    assert demand_service.downscale_intensity(1.264, dist) == pytest.approx(1.0)
    assert demand_service.downscale_intensity(0.0, dist) == 0.0
    assert demand_service.downscale_intensity(3.5, GroupSizeDistribution(probs=[1.0])) == 3.5
    with pytest.raises(ValueError):
        demand_service.downscale_intensity(-1.0, dist)


def test_group_size_frequencies(dist):
    draws = demand_service.sample_group_size(dist, np.random.default_rng(3), size=1_000_000)
    assert np.mean(draws == 1) == pytest.approx(0.804, abs=0.004)
    assert draws.mean() == pytest.approx(1.264, abs=0.01)
    assert draws.min() >= 1 and draws.max() <= 6
    point = GroupSizeDistribution(probs=[0.0, 1.0])
    assert set(demand_service.sample_group_size(point, np.random.default_rng(3), size=100)) == {2}


# ==================== SAMPLERS ====================

def test_request_count_moments():
    rng = np.random.default_rng(17)
    assert demand_service.sample_request_count(0.0, rng) == 0
    draws = demand_service.sample_request_count(5.0, rng, size=100_000)
    assert 4.93 <= draws.mean() <= 5.07
    assert 4.8 <= draws.var() <= 5.2


def test_expected_passengers_match_intensity(dist):
    rng = np.random.default_rng(23)
    lam = 5.0
    counts = demand_service.sample_request_count(demand_service.downscale_intensity(lam, dist), rng, size=100_000)
    passengers = demand_service.sample_group_size(dist, rng, size=int(counts.sum())).sum()
    assert passengers / 100_000 == pytest.approx(lam, rel=0.01)


def test_arrival_times_are_sorted_within_the_hour():
    rng = np.random.default_rng(2)
    assert len(demand_service.sample_arrival_times(0, 3600.0, rng)) == 0
    times = demand_service.sample_arrival_times(3, 3600.0, rng)
    assert len(times) == 3
    assert np.all(np.diff(times) >= 0)
    assert np.all((times >= 3600.0) & (times < 7200.0))


def test_arrival_times_are_uniform():
    times = demand_service.sample_arrival_times(100_000, 0.0, np.random.default_rng(29))
    assert stats.kstest(times / 3600.0, "uniform").statistic < 0.006


def test_destination_sampling():
    x = np.eye(1, N_COVARIATES, 0).ravel()
    single = DestinationModel(stop_id=1, categories=[9])
    assert demand_service.sample_destination(single, x, np.random.default_rng(0)) == 9

    uniform = DestinationModel(stop_id=1, categories=[2, 3, 4, 5], theta=np.zeros((3, N_COVARIATES)).tolist())
    draws = demand_service.sample_destination(uniform, x, np.random.default_rng(31), size=100_000)
    assert set(draws) == {2, 3, 4, 5}
    for stop in (2, 3, 4, 5):
        assert np.mean(draws == stop) == pytest.approx(0.25, abs=0.006)


# ==================== SCENARIOS ====================

def test_after_midnight_hours_use_the_next_calendar_day():
    holidays = [False, True, False, False, False, False, False]
    late = demand_service.evening_context(0, 23, holidays)
    early = demand_service.evening_context(0, 2, holidays)
    assert (late.weekday, late.holiday) == (Weekday.MON, False)
    assert (early.weekday, early.holiday) == (Weekday.TUE, True)
    assert demand_service.evening_context(6, 1, holidays).weekday == Weekday.MON


def test_scenario_is_reproducible_and_ordered(small_models, dist):
    cfg = ScenarioConfig(stops=sorted(small_models), seed=5, week=2)
    first = demand_service.generate_scenario(cfg, small_models, dist)
    second = demand_service.generate_scenario(cfg, small_models, dist)
    assert first == second
    assert len(first) > 0
    assert [r.request_id for r in first] == list(range(1, len(first) + 1))
    assert [r.earliest_pickup_s for r in first] == sorted(r.earliest_pickup_s for r in first)
    for rec in first:
        assert rec.pickup_stop != rec.dropoff_stop
        assert rec.dropoff_stop in small_models[rec.pickup_stop].destination.categories
        assert rec.submission_time_s == rec.earliest_pickup_s - cfg.delta_s
        offset = rec.earliest_pickup_s - rec.evening * SECONDS_PER_DAY
        assert 0 <= offset < 6 * 3600

    other = demand_service.generate_scenario(cfg.model_copy(update={"week": 3}), small_models, dist)
    assert other != first


def test_zero_intensity_gives_empty_scenario(dist):
    models = silent_models([1, 2, 3])
    assert demand_service.generate_scenario(ScenarioConfig(stops=[1, 2, 3]), models, dist) == []


def test_scenario_preconditions(small_models, dist):
    with pytest.raises(MissingModelError):
        demand_service.generate_scenario(ScenarioConfig(stops=[999]), small_models, dist)
    with pytest.raises(SchemaError):
        demand_service.generate_scenario(ScenarioConfig(stops=sorted(small_models), capacity=3), small_models, dist)


def test_split_evenings_rebases_the_clock():
    records = [
        RequestRecord(request_id=1, submission_time_s=100, pickup_stop=1, dropoff_stop=2,
                      group_size=1, earliest_pickup_s=145),
        RequestRecord(request_id=2, submission_time_s=SECONDS_PER_DAY + 10, pickup_stop=2,
                      dropoff_stop=1, group_size=2, earliest_pickup_s=SECONDS_PER_DAY + 55),
        RequestRecord(request_id=3, submission_time_s=SECONDS_PER_DAY + 500, pickup_stop=3,
                      dropoff_stop=1, group_size=1, earliest_pickup_s=SECONDS_PER_DAY + 545),
    ]
    evenings = demand_service.split_evenings(records)
    assert sorted(evenings) == [0, 1]
    tuesday = evenings[1]
    assert [r.request_id for r in tuesday] == [1, 2]
    assert [r.earliest_pickup_s for r in tuesday] == [55, 545]
    assert tuesday[0].group_size == 2


def test_scenario_file_round_trip(small_models, dist, tmp_path):
    records = demand_service.generate_scenario(ScenarioConfig(stops=sorted(small_models), seed=1), small_models, dist)
    path = demand_service.save_scenario(records, tmp_path / demand_service.scenario_filename(4, 6))
    assert path.name == "week04_Sun.csv"
    assert demand_service.load_scenario(path) == records


def test_scenario_file_with_missing_columns(tmp_path):
    path = tmp_path / "week00_Mon.csv"
    path.write_text("request_id,pickup_stop\n1,2\n")
    with pytest.raises(SchemaError):
        demand_service.load_scenario(path)
