"""
Rolling Horizon Models
Run configuration, per-vehicle state and event log records
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Set

from pydantic import BaseModel, Field

from ..config import HeuristicConfig
from .graph import EventNode, ScheduledStop
from .solution import SubproblemSolution


class RunConfig(BaseModel):
    """Everything one rolling-horizon run depends on"""
    vehicles: int = Field(ge=1)
    delta_min: float = Field(default=0.75, gt=0.0)
    omega1: float = 1.0
    omega2: float = 1.0
    omega3: float = 100.0
    heuristic: HeuristicConfig = HeuristicConfig()
    capacity: int = Field(default=6, ge=1)
    max_postpone: float = 10.0
    time_limit_s: float = 30.0
    node_limit: int = 0
    seed: int = 1


@dataclass
class VehicleState:
    vehicle: int
    executed: List[ScheduledStop] = field(default_factory=list)
    plan: List[ScheduledStop] = field(default_factory=list)
    returned: bool = False

    @property
    def anchor(self) -> Optional[ScheduledStop]:
        return self.executed[-1] if self.executed else None

    @property
    def onboard(self) -> Set[int]:
        return set(self.anchor.node.after()) if self.anchor else set()


@dataclass
class HorizonState:
    vehicles: Dict[int, VehicleState]
    clock: float = 0.0
    accepted: Set[int] = field(default_factory=set)
    denied: Set[int] = field(default_factory=set)
    completed: Set[int] = field(default_factory=set)
    promised: Dict[int, float] = field(default_factory=dict)
    onboard_pickup: Dict[int, float] = field(default_factory=dict)
    all_optimal: bool = True

    @property
    def active(self) -> Set[int]:
        return self.accepted - self.completed

    def anchored_nodes(self) -> Set[EventNode]:
        return {v.anchor.node for v in self.vehicles.values() if v.anchor}


@dataclass
class EventRecord:
    type: str
    time: float
    request: Optional[int] = None
    vehicle: Optional[int] = None
    stop: Optional[int] = None
    node: Optional[str] = None
    detail: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        record = {"type": self.type, "time": self.time}
        for key in ("request", "vehicle", "stop", "node"):
            value = getattr(self, key)
            if value is not None:
                record[key] = value
        record.update(self.detail)
        return record


@dataclass
class RunResult:
    solution: SubproblemSolution
    events: List[EventRecord]
    solves: int = 0
