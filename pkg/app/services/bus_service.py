"""
Bus Service Module
===================
Timetable baseline for the comparison with ridepooling.

TIMETABLE:
---------
trips.csv holds one row per stop visit: trip_id, seq, stop_id, time_s
(seconds from 22:00). Every ordered pair of visits (a before b) on a trip is
a direct departure from a to b. Transfers are not modelled.

WAITING TIMES:
-------------
A passenger boarding at B could have wanted to leave at any time since the
previous direct departure to the same destination. That gap, capped at the
configured threshold (also used when no earlier departure exists), is the
maximum wait; the simulated wait is uniform on [0, max wait].

Regret uses the car travel time of the stop network, so bus and ridepooling
are measured against the same private-car trip.
"""

from collections import defaultdict
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ..config import BusConfig, config
from ..models.bus import BusTrip, Departure, Timetable
from ..models.network import StopNetwork
from ..models.report import QualityReport, TripOutcome
from ..utils.constants import WEEKDAYS
from ..utils.decorators import timed
from ..utils.errors import NoConnectionError, SchemaError
from ..utils.helpers import keyed_rng, minutes_to_seconds, seconds_to_minutes
from ..utils.logger import logger
from .metrics_service import metrics_service

TRIP_COLUMNS = ["trip_id", "seq", "stop_id", "time_s"]
BUS_LOG_COLUMNS = ["origin", "dest", "B_s", "A_s"]


class BusService:
    """Timetable lookups, simulated waits and bus-side quality measures"""

    def __init__(self, settings: Optional[BusConfig] = None):
        self.settings = settings or config.bus

    # ==================== TIMETABLE ====================

    def timetable_from_frame(self, trips: pd.DataFrame) -> Timetable:
        missing = [c for c in TRIP_COLUMNS if c not in trips.columns]
        if missing:
            raise SchemaError(f"trip table lacks columns {missing}")
        trips = trips[TRIP_COLUMNS].astype({"trip_id": str}).sort_values(["trip_id", "seq"])
        gaps = trips.groupby("trip_id")["time_s"].diff().dropna()
        if (gaps <= 0).any():
            bad = trips.loc[gaps[gaps <= 0].index, "trip_id"].unique().tolist()
            raise SchemaError(f"stop times must increase strictly within a trip: {bad[:5]}")

        pairs = trips.merge(trips, on="trip_id", suffixes=("_a", "_b"))
        pairs = pairs[(pairs["seq_a"] < pairs["seq_b"]) & (pairs["stop_id_a"] != pairs["stop_id_b"])]
        departures = [
            Departure(
                trip_id=row.trip_id,
                origin_stop=int(row.stop_id_a),
                dest_stop=int(row.stop_id_b),
                departure=seconds_to_minutes(row.time_s_a),
                arrival=seconds_to_minutes(row.time_s_b),
            )
            for row in pairs.itertuples(index=False)
        ]
        tt = Timetable(departures)
        logger.debug(f"Timetable: {trips['trip_id'].nunique()} trips, {len(tt.pairs())} direct pairs")
        return tt

    def load_timetable(self, trips_csv: Union[str, Path]) -> Timetable:
        try:
            frame = pd.read_csv(trips_csv)
        except (OSError, pd.errors.ParserError) as e:
            raise SchemaError(f"cannot read trips file {trips_csv}", details=str(e))
        return self.timetable_from_frame(frame)

    # ==================== WAITING TIMES ====================

    def max_wait(self, tt: Timetable, origin: int, dest: int, boarding_time: float) -> float:
        cap = self.settings.wait_cap_min
        if not tt.serves(origin, dest):
            raise NoConnectionError(f"no direct bus from stop {origin} to stop {dest}")
        previous = tt.previous_departure(origin, dest, boarding_time)
        if previous is None:
            return cap
        return min(boarding_time - previous, cap)

    def sample_wait(self, max_wait: float, rng: np.random.Generator) -> float:
        if max_wait < 0:
            raise ValueError("maximum wait must be nonnegative")
        return float(rng.uniform(0.0, max_wait))

    def bus_trip_outcome(self, trip_id: int, trip: BusTrip, wait: float, net: StopNetwork) -> TripOutcome:
        s = self.settings.service_min
        b, a = trip.boarding_time, trip.arrival_time
        e_pick = b - wait
        departure = b + s
        e_drop = e_pick + s + net.t(trip.origin_stop, trip.dest_stop)
        return TripOutcome(
            request_id=trip_id,
            accepted=True,
            pickup_time=b,
            departure_time=departure,
            arrival_time=a,
            wait=wait,
            ride=a - departure,
            transport=a - e_pick,
            regret=a - e_drop,
        )

    @timed
    def bus_report(
        self, trips: Sequence[BusTrip], tt: Timetable, net: StopNetwork, seed: Optional[int] = None
    ) -> Tuple[QualityReport, List[TripOutcome]]:
        """Per-trip waits are drawn from the stream keyed by (seed, trip index)"""
        if not trips:
            raise SchemaError("bus report needs at least one trip")
        seed = self.settings.seed if seed is None else seed
        outcomes = []
        skipped = 0
        for k, trip in enumerate(trips, start=1):
            try:
                limit = self.max_wait(tt, trip.origin_stop, trip.dest_stop, trip.boarding_time)
            except NoConnectionError as e:
                logger.warning(f"Skipping bus trip {k}: {e.message}")
                skipped += 1
                continue
            wait = self.sample_wait(limit, keyed_rng(seed, k))
            outcomes.append(self.bus_trip_outcome(k, trip, wait, net))
        if not outcomes:
            raise NoConnectionError("no bus trip has a direct connection")
        if skipped:
            logger.warning(f"{skipped} of {len(trips)} bus trips skipped without a direct connection")

        report = self.summarize(outcomes)
        return report, outcomes

    def summarize(self, outcomes: Sequence[TripOutcome]) -> QualityReport:
        """Bus trips are all served; no routing cost is attributed to the timetable"""
        ids = [o.request_id for o in outcomes]
        return metrics_service.summarize(outcomes, ids, dict.fromkeys(ids, 1), 0.0)

    def weekday_frame(
        self, trips: Sequence[BusTrip], tt: Timetable, net: StopNetwork, seed: Optional[int] = None
    ) -> pd.DataFrame:
        """One report row per weekday in the report CSV layout (vehicles = 0)"""
        _, outcomes = self.bus_report(trips, tt, net, seed)
        by_day = defaultdict(list)
        for outcome in outcomes:
            by_day[trips[outcome.request_id - 1].evening % 7].append(outcome)
        rows = [
            metrics_service.report_row(WEEKDAYS[day], 0, self.summarize(items))
            for day, items in sorted(by_day.items())
        ]
        return metrics_service.report_frame(rows)

    # ==================== FILES ====================

    def load_bus_log(self, path: Union[str, Path]) -> List[BusTrip]:
        try:
            frame = pd.read_csv(path)
        except (OSError, pd.errors.ParserError) as e:
            raise SchemaError(f"cannot read bus log {path}", details=str(e))
        missing = [c for c in BUS_LOG_COLUMNS if c not in frame.columns]
        if missing:
            raise SchemaError(f"bus log {path} lacks columns {missing}")
        trips = []
        for line, row in enumerate(frame.to_dict("records"), start=2):
            try:
                trips.append(BusTrip(
                    origin_stop=int(row["origin"]),
                    dest_stop=int(row["dest"]),
                    boarding_time=seconds_to_minutes(row["B_s"]),
                    arrival_time=seconds_to_minutes(row["A_s"]),
                    evening=int(row.get("evening", 0)),
                ))
            except ValueError as e:
                raise SchemaError(f"invalid bus log row {line} in {path}", details=str(e))
        return trips

    def save_bus_log(self, trips: Iterable[BusTrip], path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        frame = pd.DataFrame(
            [
                {
                    "origin": t.origin_stop,
                    "dest": t.dest_stop,
                    "B_s": minutes_to_seconds(t.boarding_time),
                    "A_s": minutes_to_seconds(t.arrival_time),
                    "evening": t.evening,
                }
                for t in trips
            ],
            columns=BUS_LOG_COLUMNS + ["evening"],
        )
        frame.to_csv(path, index=False)
        return path


# Global bus service instance
bus_service = BusService()
