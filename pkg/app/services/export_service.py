"""
Export Service Module
Station summaries of a request scenario as a JSON document for map viewers
"""

import json
import math
from collections import Counter, defaultdict
from pathlib import Path
from typing import Dict, Optional, Sequence, Union

from ..models.demand import RequestRecord
from ..models.network import StopNetwork
from ..utils.constants import SECONDS_PER_DAY, WEEKDAYS
from ..utils.helpers import get_current_timestamp, scenario_hour, seconds_to_minutes
from ..utils.logger import logger
from .demand_service import demand_service

# Marker radius of a station with a single boarding
BASE_RADIUS = 4.0


class ExportService:
    """Builds per-station boarding summaries"""

    def matches(
        self,
        rec: RequestRecord,
        weekday: Optional[int] = None,
        hour: Optional[int] = None,
        holiday: Optional[bool] = None,
        holidays: Sequence[bool] = (False,) * 7,
        first_evening: int = 0,
    ) -> bool:
        """
        Weekday and holiday are those of the calendar day of the pick-up hour.
        `first_evening` is the weekday of evening 0 in the records (0 = Monday).
        """
        minute = seconds_to_minutes(rec.earliest_pickup_s - rec.evening * SECONDS_PER_DAY)
        evening = (rec.evening + first_evening) % 7
        ctx = demand_service.evening_context(evening, scenario_hour(minute), holidays)
        if weekday is not None and int(ctx.weekday) != weekday:
            return False
        if hour is not None and ctx.hour != hour:
            return False
        if holiday is not None and ctx.holiday != holiday:
            return False
        return True

    def export_scenario_json(
        self,
        records: Sequence[RequestRecord],
        net: StopNetwork,
        weekday: Optional[int] = None,
        hour: Optional[int] = None,
        holiday: Optional[bool] = None,
        holidays: Sequence[bool] = (False,) * 7,
        first_evening: int = 0,
    ) -> Dict:
        chosen = [r for r in records if self.matches(r, weekday, hour, holiday, holidays, first_evening)]
        boardings: Counter = Counter()
        destinations: Dict[int, Counter] = defaultdict(Counter)
        for rec in chosen:
            boardings[rec.pickup_stop] += rec.group_size
            destinations[rec.pickup_stop][rec.dropoff_stop] += rec.group_size

        stations = []
        for stop in net.stops:
            x, y = net.position(stop)
            count = boardings.get(stop, 0)
            stations.append({
                "id": stop,
                "x_km": x,
                "y_km": y,
                "boardings": count,
                "radius": BASE_RADIUS * math.sqrt(count),
                "active": count > 0,
                "destinations": [
                    {"stop": dest, "count": n}
                    for dest, n in sorted(destinations[stop].items(), key=lambda item: (-item[1], item[0]))
                ],
            })
        logger.debug(f"Exported {len(chosen)} of {len(records)} requests over {len(stations)} stations")
        return {
            "generated": get_current_timestamp(),
            "filters": {
                "weekday": WEEKDAYS[weekday] if weekday is not None else None,
                "hour": hour,
                "holiday": holiday,
            },
            "n_requests": len(chosen),
            "n_passengers": sum(boardings.values()),
            "stations": stations,
        }

    def save_json(self, document: Dict, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(document, f, indent=2)
        return path


# Global export service instance
export_service = ExportService()
