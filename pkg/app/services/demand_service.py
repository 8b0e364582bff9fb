"""
Demand Service Module
======================
Monte-Carlo scenario generation from the fitted per-stop models.

For every evening, service hour and stop the Poisson intensity is predicted
from the calendar covariates, divided by the mean group size, and a count of
requests is drawn. Each request then gets a group size, a uniform arrival
time within the hour and a destination from the stop's multinomial model.

RANDOM STREAMS:
--------------
Each (seed, week, stop, evening, hour) key gets its own generator, so the
draws for one stop-hour never depend on how many requests other stop-hours
produced. Within a stream the draw order is fixed: count, group sizes,
arrival times, destinations.

SCENARIO CLOCK:
--------------
Times are integer seconds from 22:00 of the first evening of the week.
Hours after midnight belong to the evening that started the day before;
their weekday and holiday covariates are those of the calendar day.
"""

from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..models.calendar import CalendarContext, Weekday
from ..models.demand import GroupSizeDistribution, RequestRecord, ScenarioConfig
from ..models.regression import DestinationModel, StopModels
from ..utils.constants import SCENARIO_START_HOUR, SECONDS_PER_DAY, WEEKDAYS
from ..utils.decorators import timed
from ..utils.errors import MissingModelError, SchemaError
from ..utils.helpers import evening_offset_hours, keyed_rng
from ..utils.logger import logger
from .covariate_service import covariate_service
from .regression_service import regression_service

SCENARIO_COLUMNS = [
    "request_id",
    "submission_time_s",
    "pickup_stop",
    "dropoff_stop",
    "group_size",
    "earliest_pickup_s",
]


class DemandService:
    """Samples weekly request scenarios"""

    # ==================== ELEMENTARY SAMPLERS ====================

    def downscale_intensity(self, lam: float, dist: GroupSizeDistribution) -> float:
        if lam < 0:
            raise ValueError("intensity must be nonnegative")
        return lam / dist.mean

    def sample_request_count(self, lam_scaled: float, rng: np.random.Generator, size=None):
        if lam_scaled < 0:
            raise ValueError("intensity must be nonnegative")
        return rng.poisson(lam_scaled, size=size)

    def sample_group_size(self, dist: GroupSizeDistribution, rng: np.random.Generator, size=None):
        return rng.choice(dist.sizes, size=size, p=dist.probs)

    def sample_arrival_times(self, count: int, hour_start: float, rng: np.random.Generator) -> np.ndarray:
        """Sorted uniform times in [hour_start, hour_start + 3600) seconds"""
        if count < 0:
            raise ValueError("count must be nonnegative")
        return np.sort(hour_start + rng.uniform(0.0, 3600.0, size=count))

    def sample_destination(self, model: DestinationModel, x, rng: np.random.Generator, size=None):
        probs = regression_service.predict_destination_probs(model, x)
        picks = rng.choice(len(model.categories), size=size, p=probs)
        return np.asarray(model.categories)[picks] if size is not None else model.categories[int(picks)]

    # ==================== SCENARIOS ====================

    def evening_context(self, evening: int, hour: int, holidays: Sequence[bool]) -> CalendarContext:
        """Calendar covariates of a service hour belonging to `evening` (0 = Monday)"""
        day = evening if hour >= SCENARIO_START_HOUR else evening + 1
        return CalendarContext(weekday=Weekday(day % 7), hour=hour, holiday=bool(holidays[day % 7]))

    @timed
    def generate_scenario(
        self,
        cfg: ScenarioConfig,
        models: Mapping[int, StopModels],
        dist: Optional[GroupSizeDistribution] = None,
    ) -> List[RequestRecord]:
        dist = dist or GroupSizeDistribution()
        if dist.max_size > cfg.capacity:
            raise SchemaError(f"group sizes up to {dist.max_size} exceed vehicle capacity {cfg.capacity}")
        missing = [s for s in cfg.stops if s not in models]
        if missing:
            raise MissingModelError(f"no fitted models for stops {missing[:10]}")

        rows = []
        dropped = 0
        for evening in range(7):
            for hour in cfg.service_hours:
                ctx = self.evening_context(evening, hour, cfg.holidays)
                x = covariate_service.encode_array(ctx)
                hour_start = evening * SECONDS_PER_DAY + evening_offset_hours(hour) * 3600
                for stop in sorted(cfg.stops):
                    found, lost = self._sample_stop_hour(cfg, models[stop], dist, x, evening, hour, hour_start)
                    rows.extend(found)
                    dropped += lost

        if dropped:
            logger.warning(f"Week {cfg.week}: dropped {dropped} requests whose destination equals the origin")
        rows.sort()
        records = [
            RequestRecord(
                request_id=k,
                submission_time_s=earliest - cfg.delta_s,
                pickup_stop=origin,
                dropoff_stop=dest,
                group_size=size,
                earliest_pickup_s=earliest,
            )
            for k, (earliest, origin, dest, size) in enumerate(rows, start=1)
        ]
        logger.info(f"Week {cfg.week}: generated {len(records)} requests")
        return records

    def _sample_stop_hour(self, cfg, models: StopModels, dist, x, evening, hour, hour_start):
        rng = keyed_rng(cfg.seed, cfg.week, models.stop_id, evening, hour)
        lam = regression_service.predict_intensity(models.poisson, x) * cfg.intensity_scale
        count = int(self.sample_request_count(self.downscale_intensity(lam, dist), rng))
        if count == 0:
            return [], 0
        sizes = self.sample_group_size(dist, rng, size=count)
        times = self.sample_arrival_times(count, hour_start, rng)
        origin = models.stop_id
        found, lost = [], 0
        for size, time in zip(sizes, times):
            dest = self._draw_destination(models.destination, x, rng, origin, cfg.destination_resamples)
            if dest is None:
                lost += 1
                continue
            found.append((int(np.floor(time)), origin, int(dest), int(size)))
        return found, lost

    def _draw_destination(self, model: DestinationModel, x, rng, origin: int, attempts: int) -> Optional[int]:
        for _ in range(attempts):
            dest = self.sample_destination(model, x, rng)
            if dest != origin:
                return dest
        logger.debug(f"stop {origin}: destination resampling exhausted")
        return None

    def split_evenings(self, records: Sequence[RequestRecord]) -> Dict[int, List[RequestRecord]]:
        """One instance per evening, clock rebased to 22:00 and ids renumbered from 1"""
        evenings: Dict[int, List[RequestRecord]] = {}
        for rec in records:
            evenings.setdefault(rec.evening, []).append(rec)
        result = {}
        for evening, items in sorted(evenings.items()):
            offset = evening * SECONDS_PER_DAY
            result[evening] = [
                rec.model_copy(update={
                    "request_id": k,
                    "submission_time_s": rec.submission_time_s - offset,
                    "earliest_pickup_s": rec.earliest_pickup_s - offset,
                })
                for k, rec in enumerate(items, start=1)
            ]
        return result

    # ==================== FILES ====================

    def scenario_frame(self, records: Sequence[RequestRecord]) -> pd.DataFrame:
        return pd.DataFrame([r.model_dump() for r in records], columns=SCENARIO_COLUMNS)

    def save_scenario(self, records: Sequence[RequestRecord], path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.scenario_frame(records).to_csv(path, index=False)
        return path

    def load_scenario(self, path: Union[str, Path]) -> List[RequestRecord]:
        try:
            frame = pd.read_csv(path)
        except (OSError, pd.errors.ParserError) as e:
            raise SchemaError(f"cannot read scenario {path}", details=str(e))
        missing = [c for c in SCENARIO_COLUMNS if c not in frame.columns]
        if missing:
            raise SchemaError(f"scenario {path} lacks columns {missing}")
        try:
            return [RequestRecord(**{c: int(row[c]) for c in SCENARIO_COLUMNS}) for _, row in frame.iterrows()]
        except ValueError as e:
            raise SchemaError(f"invalid row in scenario {path}", details=str(e))

    def scenario_filename(self, week: int, evening: int) -> str:
        return f"week{week:02d}_{WEEKDAYS[evening % 7]}.csv"


# Global demand service instance
demand_service = DemandService()
