# Services Package
# Business Logic Layer

from .bus_service import BusService
from .covariate_service import CovariateService
from .demand_service import DemandService
from .event_graph_service import EventGraph
from .export_service import ExportService
from .fit_service import FitService
from .fleet_service import FleetService
from .horizon_service import RollingHorizonService
from .metrics_service import MetricsService
from .network_service import NetworkService
from .path_heuristic import PathHeuristic
from .regression_service import RegressionService
from .request_service import RequestService
from .schedule_service import ScheduleService
from .subproblem_solver import SubproblemSolver
from .synthetic_service import SyntheticDataService
from .validator_service import ValidatorService

__all__ = [
    "BusService",
    "CovariateService",
    "DemandService",
    "EventGraph",
    "ExportService",
    "FitService",
    "FleetService",
    "RollingHorizonService",
    "MetricsService",
    "NetworkService",
    "PathHeuristic",
    "RegressionService",
    "RequestService",
    "ScheduleService",
    "SubproblemSolver",
    "SyntheticDataService",
    "ValidatorService",
]
