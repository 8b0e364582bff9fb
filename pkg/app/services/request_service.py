"""
Request Service Module
Derives time windows and ride-time limits from sampled requests
"""

from typing import Iterable, List, Optional

from ..config import RequestConfig, config
from ..models.demand import RequestRecord
from ..models.network import StopNetwork
from ..models.request import Request, ServiceWindow
from ..utils.errors import OutOfServiceError
from ..utils.helpers import seconds_to_minutes
from ..utils.logger import logger


class RequestService:
    """Turns RequestRecords into solver Requests (minutes)"""

    def __init__(self, settings: Optional[RequestConfig] = None):
        self.settings = settings or config.requests

    def service_window(self) -> ServiceWindow:
        return ServiceWindow(e0=self.settings.service_start_min, l0=self.settings.service_end_min)

    def max_ride_time(self, t_direct: float) -> float:
        return max(self.settings.ride_factor * t_direct, t_direct + self.settings.ride_slack_min)

    def derive_request(self, rec: RequestRecord, net: StopNetwork) -> Request:
        p = self.settings
        s = p.service_min
        t = net.t(rec.pickup_stop, rec.dropoff_stop)
        e_pick = seconds_to_minutes(rec.earliest_pickup_s)
        if e_pick < p.service_start_min or e_pick > p.service_end_min - s - t:
            raise OutOfServiceError(
                f"request {rec.request_id}: earliest pick-up {e_pick:.2f} min cannot be served "
                f"within [{p.service_start_min:g}, {p.service_end_min:g}]"
            )
        if rec.group_size > p.capacity:
            raise OutOfServiceError(f"request {rec.request_id}: group of {rec.group_size} exceeds capacity")

        l_pick = e_pick + p.pickup_window_min
        max_ride = self.max_ride_time(t)
        req = Request(
            id=rec.request_id,
            pickup_stop=rec.pickup_stop,
            dropoff_stop=rec.dropoff_stop,
            group_size=rec.group_size,
            reveal_time=seconds_to_minutes(rec.submission_time_s),
            e_pick=e_pick,
            l_pick=l_pick,
            e_drop=e_pick + s + t,
            l_drop=l_pick + s + max_ride,
            service=s,
            max_ride=max_ride,
            t_direct=t,
        )
        # Serving the request alone, straight away, is always possible
        assert req.e_pick + s + t <= req.l_drop
        return req

    def derive_all(self, records: Iterable[RequestRecord], net: StopNetwork, skip_out_of_service: bool = True) -> List[Request]:
        requests = []
        for rec in records:
            try:
                requests.append(self.derive_request(rec, net))
            except OutOfServiceError as e:
                if not skip_out_of_service:
                    raise
                logger.warning(f"Skipping request: {e.message}")
        return requests


# Global request service instance
request_service = RequestService()
