"""
Fleet Service Module
Fleet sizing from simulated demand

For every weekday the request counts per service hour are averaged over all
simulated weeks; the busiest hour's average, divided by the number of
requests one vehicle serves per hour, gives scenario A. Scenarios B and C
use one vehicle less and one more.
"""

import math
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..config import FleetConfig, config
from ..models.demand import RequestRecord
from ..models.report import FleetPlan
from ..utils.constants import SCENARIO_START_HOUR, SECONDS_PER_DAY, WEEKDAYS
from ..utils.errors import SchemaError
from ..utils.logger import logger

FLEET_COLUMNS = ["weekday", "avg_hourly_max", "scenario_a", "scenario_b", "scenario_c"]


class FleetService:
    """Weekday fleet sizes for scenarios A, B and C"""

    def __init__(self, settings: Optional[FleetConfig] = None):
        self.settings = settings or config.fleet

    def size_fleet(self, max_avg_requests: float) -> int:
        if max_avg_requests < 0:
            raise ValueError("request rate must be nonnegative")
        vehicles = math.ceil(max_avg_requests / self.settings.requests_per_vehicle)
        return max(self.settings.min_vehicles, vehicles)

    def hourly_counts(self, week: Iterable[RequestRecord], service_hours: Sequence[int]) -> np.ndarray:
        """Counts of shape (7 evenings, len(service_hours)); times as in scenario files"""
        column = {h: k for k, h in enumerate(service_hours)}
        counts = np.zeros((7, len(service_hours)))
        for rec in week:
            evening = rec.evening
            offset = rec.earliest_pickup_s - evening * SECONDS_PER_DAY
            hour = (SCENARIO_START_HOUR + offset // 3600) % 24
            if not 0 <= evening < 7 or hour not in column:
                raise SchemaError(f"request {rec.request_id} lies outside the simulated service hours")
            counts[evening, column[hour]] += 1
        return counts

    def max_avg_hourly(
        self, weeks: Sequence[Iterable[RequestRecord]], service_hours: Optional[Sequence[int]] = None
    ) -> Dict[str, float]:
        """Per weekday: maximum over hours of the mean (over weeks) hourly request count"""
        if not weeks:
            raise ValueError("at least one simulated week is required")
        service_hours = list(service_hours or config.demand.service_hours)
        mean = np.mean([self.hourly_counts(week, service_hours) for week in weeks], axis=0)
        return {WEEKDAYS[d]: float(mean[d].max()) for d in range(7)}

    def fleet_plan(self, weekday: str, max_avg_requests: float) -> FleetPlan:
        a = self.size_fleet(max_avg_requests)
        return FleetPlan(
            weekday=weekday,
            avg_hourly_max=max_avg_requests,
            scenario_a=a,
            scenario_b=max(a - 1, 1),
            scenario_c=a + 1,
        )

    def fleet_plans(self, maxima: Dict[str, float]) -> List[FleetPlan]:
        plans = [self.fleet_plan(day, value) for day, value in maxima.items()]
        for plan in plans:
            logger.info(
                f"{plan.weekday}: max avg {plan.avg_hourly_max:.1f} requests/h -> "
                f"A={plan.scenario_a} B={plan.scenario_b} C={plan.scenario_c}"
            )
        return plans

    # ==================== FILES ====================

    def plans_frame(self, plans: Iterable[FleetPlan]) -> pd.DataFrame:
        return pd.DataFrame([p.model_dump() for p in plans], columns=FLEET_COLUMNS)

    def save_plans(self, plans: Iterable[FleetPlan], path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.plans_frame(plans).to_csv(path, index=False)
        return path

    def load_plans(self, path: Union[str, Path]) -> Dict[str, FleetPlan]:
        try:
            frame = pd.read_csv(path)
        except (OSError, pd.errors.ParserError) as e:
            raise SchemaError(f"cannot read fleet plan {path}", details=str(e))
        missing = [c for c in FLEET_COLUMNS if c not in frame.columns]
        if missing:
            raise SchemaError(f"fleet plan {path} lacks columns {missing}")
        return {row["weekday"]: FleetPlan(**row) for row in frame[FLEET_COLUMNS].to_dict("records")}


# Global fleet service instance
fleet_service = FleetService()
