"""
Shared pytest fixtures: small stop networks, a request factory and quiet logging.
"""

import numpy as np
import pytest

from app.config import NetworkConfig, RequestConfig
from app.models.demand import RequestRecord
from app.models.network import StopNetwork
from app.models.request import Request, ServiceWindow
from app.services.network_service import NetworkService
from app.services.request_service import RequestService
from app.utils.logger import setup_logger


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: end-to-end runs that take more than a few seconds")


@pytest.fixture(autouse=True, scope="session")
def quiet_logs():
    setup_logger(level="WARNING", log_file="", console=True, colorize=False)


@pytest.fixture
def line_network() -> StopNetwork:
    """Stops 1..4 on a line 1 km apart, depot half a kilometre off stop 1"""
    coords = {0: (0.0, 0.5), 1: (0.0, 0.0), 2: (1.0, 0.0), 3: (2.0, 0.0), 4: (3.0, 0.0)}
    return NetworkService(NetworkConfig()).from_coordinates(coords)


@pytest.fixture
def unit_time_network() -> StopNetwork:
    """Every trip between distinct stops costs 1 km and takes 1 minute"""
    n = 5
    ones = np.ones((n, n)) - np.eye(n)
    return StopNetwork(
        stop_ids=tuple(range(n)),
        coords=np.zeros((n, 2)),
        cost=ones.copy(),
        time=ones.copy(),
    )


@pytest.fixture
def window() -> ServiceWindow:
    return ServiceWindow(e0=0.0, l0=480.0)


@pytest.fixture
def request_service() -> RequestService:
    return RequestService(RequestConfig())


@pytest.fixture
def make_request(request_service):
    """
    Build a solver request from stop ids and an earliest pick-up in minutes.
    `lead` is how many minutes before e_pick the request is revealed.
    """
    def factory(rid: int, pickup: int, dropoff: int, e_pick: float, net: StopNetwork,
                group_size: int = 1, lead: float = 0.75) -> Request:
        record = RequestRecord(
            request_id=rid,
            submission_time_s=int(round((e_pick - lead) * 60)),
            pickup_stop=pickup,
            dropoff_stop=dropoff,
            group_size=group_size,
            earliest_pickup_s=int(round(e_pick * 60)),
        )
        return request_service.derive_request(record, net)

    return factory
