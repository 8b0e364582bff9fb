"""
Report Models
Per-trip outcomes, aggregate service quality and fleet plans
"""

from typing import Dict, Optional

from pydantic import BaseModel, Field


class TripOutcome(BaseModel):
    """Times in minutes; None for denied requests"""
    request_id: int
    accepted: bool
    group_size: int = 1
    pickup_time: Optional[float] = None
    departure_time: Optional[float] = None
    arrival_time: Optional[float] = None
    wait: Optional[float] = None
    ride: Optional[float] = None
    transport: Optional[float] = None
    regret: Optional[float] = None


class QualityReport(BaseModel):
    """Averages run over accepted requests and are None when nobody was served"""
    n_requests: int
    n_accepted: int
    total_routing_cost: float
    pct_denied: float = Field(ge=0.0, le=100.0)
    avg_regret: Optional[float] = None
    avg_wait: Optional[float] = None
    avg_ride: Optional[float] = None
    avg_transport: Optional[float] = None


class FleetPlan(BaseModel):
    """Scenario A follows the sizing rule, B has one vehicle less, C one more"""
    weekday: str
    avg_hourly_max: float = Field(ge=0.0)
    scenario_a: int
    scenario_b: int
    scenario_c: int

    def vehicles(self, scenario: str) -> int:
        return {"A": self.scenario_a, "B": self.scenario_b, "C": self.scenario_c}[scenario.upper()]


class ValidationParams(BaseModel):
    """Limits a finished evening is checked against; times in minutes"""
    capacity: int = Field(default=6, ge=1)
    max_postpone: float = 10.0
    e0: float = 0.0
    l0: float = 480.0
    promised: Dict[int, float] = {}
    tol: float = 1e-6


class Violation(BaseModel):
    kind: str
    message: str
    request: Optional[int] = None
    vehicle: Optional[int] = None
