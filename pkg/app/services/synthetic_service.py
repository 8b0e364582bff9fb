"""
Synthetic Data Service Module
==============================
Stand-ins for the proprietary inputs: ground-truth demand models, a
passenger log drawn from them, a bus timetable and the bus trips that the
timetable would carry.

CALIBRATION:
-----------
- Hour effects follow HOUR_PROFILE (relative to noon); the evening peaks at
  23:00 and fades out towards 04:00.
- Weekday effects follow WEEKDAY_PROFILE, busiest on Monday, quietest on
  Saturday. Holidays scale demand by HOLIDAY_FACTOR.
- Stop weights are log-normal. Intercepts are set so that Monday 23:00, the
  busiest hour, carries `peak_requests` requests city wide (passenger
  intensity = requests * mean group size).
- Each origin sends passengers to a random subset of stops; the nearest one
  is the reference destination, farther ones are less likely.
"""

from datetime import date, timedelta
from typing import Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from ..config import BusConfig, config
from ..models.bus import BusTrip, Timetable
from ..models.calendar import CalendarContext, Weekday
from ..models.demand import GroupSizeDistribution, RequestRecord
from ..models.network import StopNetwork
from ..models.regression import DestinationModel, FitReport, PoissonModel, StopModels
from ..utils.constants import N_COVARIATES, REFERENCE_HOUR, SECONDS_PER_DAY, WEEKDAYS
from ..utils.decorators import timed
from ..utils.helpers import keyed_rng, seconds_to_minutes
from ..utils.logger import logger
from .covariate_service import covariate_service
from .regression_service import regression_service

HOUR_PROFILE = np.array([
    0.75, 0.55, 0.40, 0.30, 0.20, 0.35, 0.90, 1.60,
    1.80, 1.30, 1.20, 1.30, 1.40, 1.50, 1.70, 1.90,
    2.00, 1.90, 1.50, 1.20, 1.00, 0.95, 0.90, 1.00,
])
WEEKDAY_PROFILE = np.array([37.2, 34.6, 26.7, 30.8, 24.1, 17.9, 26.5]) / 37.2
HOLIDAY_FACTOR = 0.8
PEAK_HOUR = 23

LOG_COLUMNS = ["date", "weekday", "hour", "holiday", "origin_stop", "dest_stop", "count"]
TRIP_COLUMNS = ["trip_id", "seq", "stop_id", "time_s"]

# First Monday of 2019
DEFAULT_START = date(2019, 1, 7)


def _truth_report() -> FitReport:
    return FitReport(log_likelihood=0.0, iterations=0, converged=True, gradient_norm=0.0)


class SyntheticDataService:
    """Generates ground truth models, logs and timetables"""

    # ==================== DEMAND MODELS ====================

    def shared_effects(self) -> np.ndarray:
        """Coefficients common to all stops (intercept left at 0)"""
        beta = np.zeros(N_COVARIATES)
        for day in list(Weekday)[1:]:
            beta[int(day)] = np.log(WEEKDAY_PROFILE[int(day)])
        for hour in range(24):
            if hour != REFERENCE_HOUR:
                beta[covariate_service.index_of_hour(hour)] = np.log(HOUR_PROFILE[hour] / HOUR_PROFILE[REFERENCE_HOUR])
        beta[-1] = np.log(HOLIDAY_FACTOR)
        return beta

    @timed
    def build_ground_truth_models(
        self,
        net: StopNetwork,
        seed: int,
        peak_requests: Optional[float] = None,
        dist: Optional[GroupSizeDistribution] = None,
        destinations_per_stop: int = 8,
    ) -> Dict[int, StopModels]:
        peak_requests = config.pipeline.peak_requests if peak_requests is None else peak_requests
        dist = dist or GroupSizeDistribution()
        rng = keyed_rng(seed, len(net.stops))
        stops = list(net.stops)
        weights = rng.lognormal(0.0, 0.6, size=len(stops))
        weights /= weights.sum()

        shared = self.shared_effects()
        peak_x = covariate_service.encode_array(CalendarContext(weekday=Weekday.MON, hour=PEAK_HOUR))
        peak_offset = float(shared @ peak_x)

        models = {}
        for stop, w in zip(stops, weights):
            beta = shared.copy()
            beta[0] = np.log(peak_requests * dist.mean * w) - peak_offset
            destination = self._destination_model(net, stop, rng, destinations_per_stop)
            models[stop] = StopModels(
                stop_id=stop,
                poisson=PoissonModel(stop_id=stop, beta=beta.tolist()),
                destination=destination,
                poisson_report=_truth_report(),
                destination_report=_truth_report(),
            )
        logger.info(f"Built ground-truth models for {len(models)} stops, peak {peak_requests:g} requests/h")
        return models

    def _destination_model(self, net: StopNetwork, origin: int, rng: np.random.Generator, k: int) -> DestinationModel:
        others = [s for s in net.stops if s != origin]
        chosen = rng.choice(others, size=min(k, len(others)), replace=False)
        ordered = sorted((int(s) for s in chosen), key=lambda s: (net.c(origin, s), s))
        theta = np.zeros((len(ordered) - 1, N_COVARIATES))
        nearest = net.c(origin, ordered[0])
        for row, dest in enumerate(ordered[1:]):
            theta[row, 0] = -0.15 * (net.c(origin, dest) - nearest) + rng.normal(0.0, 0.4)
            theta[row, int(Weekday.SAT)] = rng.normal(0.0, 0.2)
            theta[row, int(Weekday.SUN)] = rng.normal(0.0, 0.2)
        return DestinationModel(stop_id=origin, categories=ordered, theta=theta.tolist())

    # ==================== PASSENGER LOG ====================

    @timed
    def generate_trip_log(
        self,
        models: Mapping[int, StopModels],
        weeks: int,
        seed: int,
        holidays: Iterable[date] = (),
        start: date = DEFAULT_START,
    ) -> pd.DataFrame:
        """Per-passenger log aggregated to (date, hour, origin, destination) counts"""
        holidays = set(holidays)
        days = [start + timedelta(days=k) for k in range(7 * weeks)]
        contexts = [
            CalendarContext(weekday=Weekday(d.weekday()), hour=h, holiday=d in holidays)
            for d in days for h in range(24)
        ]
        X = covariate_service.encode_many(contexts)

        rows = []
        for stop in sorted(models):
            item = models[stop]
            rng = keyed_rng(seed, stop)
            lam = np.exp(X @ item.poisson.coefficients())
            counts = rng.poisson(lam)
            probs_cache: Dict[tuple, np.ndarray] = {}
            for slot in np.flatnonzero(counts):
                ctx = contexts[slot]
                key = (ctx.weekday, ctx.hour, ctx.holiday)
                if key not in probs_cache:
                    probs_cache[key] = regression_service.predict_destination_probs(item.destination, X[slot])
                split = rng.multinomial(int(counts[slot]), probs_cache[key])
                day = days[slot // 24]
                for k in np.flatnonzero(split):
                    rows.append((day.isoformat(), WEEKDAYS[day.weekday()], ctx.hour, int(ctx.holiday),
                                 stop, item.destination.categories[k], int(split[k])))
        frame = pd.DataFrame(rows, columns=LOG_COLUMNS)
        logger.info(f"Generated trip log: {len(frame)} rows, {int(frame['count'].sum()) if len(frame) else 0} passengers")
        return frame

    # ==================== BUS TIMETABLE ====================

    def build_synthetic_timetable(
        self,
        net: StopNetwork,
        n_lines: Optional[int] = None,
        headway_min: Optional[float] = None,
        seed: Optional[int] = None,
        settings: Optional[BusConfig] = None,
        service_end_min: Optional[float] = None,
    ) -> pd.DataFrame:
        """
        Radial lines through a random hub, one per angular sector, run in
        both directions every `headway_min` minutes over the evening.
        """
        settings = settings or config.bus
        n_lines = settings.n_lines if n_lines is None else n_lines
        headway_min = settings.headway_min if headway_min is None else headway_min
        seed = settings.seed if seed is None else seed
        service_end_min = config.requests.service_end_min if service_end_min is None else service_end_min

        rng = keyed_rng(seed, len(net.stops), n_lines)
        stops = list(net.stops)
        hub = int(rng.choice(stops))
        hx, hy = net.position(hub)
        angles = {s: np.arctan2(net.position(s)[1] - hy, net.position(s)[0] - hx) for s in stops if s != hub}
        sector = {s: int((a + np.pi) / (2 * np.pi) * n_lines) % n_lines for s, a in angles.items()}

        lines = []
        for k in range(n_lines):
            members = sorted((s for s in sector if sector[s] == k), key=lambda s: (net.c(hub, s), s))
            if members:
                lines.append([hub] + members)
                lines.append(list(reversed(members)) + [hub])

        rows = []
        for line_no, line in enumerate(lines):
            offsets = [0.0]
            for a, b in zip(line, line[1:]):
                offsets.append(offsets[-1] + settings.dwell_min + settings.slowdown * net.t(a, b))
            start = 0.0
            trip_no = 0
            while start + offsets[-1] <= service_end_min:
                trip_id = f"L{line_no:02d}T{trip_no:03d}"
                for seq, (stop, off) in enumerate(zip(line, offsets), start=1):
                    rows.append((trip_id, seq, stop, int(round((start + off) * 60))))
                start += headway_min
                trip_no += 1
        frame = pd.DataFrame(rows, columns=TRIP_COLUMNS)
        logger.info(f"Built synthetic timetable: {len(lines)} line directions, {frame['trip_id'].nunique()} trips")
        return frame

    def generate_bus_log(self, records: Sequence[RequestRecord], tt: Timetable) -> List[BusTrip]:
        """Board the first direct departure at or after the desired time; others are skipped"""
        trips, skipped = [], 0
        for rec in records:
            evening = rec.evening
            desired = seconds_to_minutes(rec.earliest_pickup_s - evening * SECONDS_PER_DAY)
            dep = tt.next_departure(rec.pickup_stop, rec.dropoff_stop, desired)
            if dep is None:
                skipped += 1
                continue
            trips.append(BusTrip(
                origin_stop=rec.pickup_stop,
                dest_stop=rec.dropoff_stop,
                boarding_time=dep.departure,
                arrival_time=dep.arrival,
                evening=evening,
            ))
        if skipped:
            logger.info(f"Bus log: {skipped} of {len(records)} requests have no direct departure")
        return trips


# Global synthetic data service instance
synthetic_service = SyntheticDataService()
