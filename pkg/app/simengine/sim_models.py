# app/simengine/sim_models.py
from __future__ import annotations

from typing import Dict, List, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.commgraph.graph_models import CommGraph
from app.placement.placement_models import Placement, ServerSpec
from app.settings import settings

PriorityClass = Literal["real_time", "latency_sensitive", "compute_intensive"]
ServiceDistribution = Literal["deterministic", "exponential"]

CLASS_RANK: Dict[str, int] = {
    "real_time": 0,
    "latency_sensitive": 1,
    "compute_intensive": 2,
}

EVENT_PACKET_IN = "packet_in"
EVENT_HEARTBEAT = "heartbeat"
EVENT_LINK_FAILURE = "link_failure"


class AppModel(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    app_id: str
    service_time_ms: float = Field(gt=0.0)
    service_dist: ServiceDistribution = "deterministic"
    cpu_demand: float = Field(default=0.0, ge=0.0)
    mem_demand: float = Field(default=0.0, ge=0.0)
    priority_class: PriorityClass

    @property
    def rank(self) -> int:
        return CLASS_RANK[self.priority_class]


class SimScenario(BaseModel):
    """Everything one simulator run needs; times in ms unless the field says otherwise."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    servers: ServerSpec
    graph: CommGraph
    placement: Placement
    apps: List[AppModel]
    packet_in_rate: float = Field(default=0.0, ge=0.0)
    packet_in_path: List[str] = ["FW", "RL"]
    heartbeat_rate: float = Field(default=10.0, ge=0.0)
    heartbeat_deadline_ms: float = Field(default=100.0, gt=0.0)
    link_failure_interval_s: float | None = Field(default=10.0, gt=0.0)
    cross_server_hop_ms: float = Field(default_factory=lambda: settings.cross_server_hop_ms, ge=0.0)
    prioritization: bool = True
    duration_s: float = Field(gt=0.0)
    seed: int = 0
    simulated_partitions: List[int] = [0]
    dj_quantum_ms: float = Field(default_factory=lambda: settings.dj_quantum_ms, gt=0.0)
    warmup_fraction: float = Field(default_factory=lambda: settings.warmup_fraction, ge=0.0, lt=1.0)

    @model_validator(mode="after")
    def _check_apps(self) -> "SimScenario":
        ids = [a.app_id for a in self.apps]
        if len(set(ids)) != len(ids):
            raise ValueError("app ids must be unique")
        return self

    def app(self, app_id: str) -> AppModel | None:
        for item in self.apps:
            if item.app_id == app_id:
                return item
        return None

    def apps_of_class(self, priority_class: PriorityClass) -> List[AppModel]:
        return [a for a in self.apps if a.priority_class == priority_class]


class LatencySummary(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    count: int
    p50: float
    p95: float
    p99: float
    mean: float


class StationStats(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    server: int
    arrivals: int
    arrival_rate: float  # per ms
    mean_sojourn_ms: float
    mean_in_system: float
    utilization: float

    @property
    def littles_law_ratio(self) -> float:
        expected = self.arrival_rate * self.mean_sojourn_ms
        return self.mean_in_system / expected if expected > 0 else 1.0


class SimMetrics(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    throughput: float  # completed packet-in pipelines per second
    offered_rate: float  # generated packet-ins per second inside the measurement window
    nominal_rate: float
    generated_packet_ins: int
    completed_packet_ins: int
    latency_quantiles: Dict[str, LatencySummary]
    heartbeats: int
    missed_deadlines: int
    missed_fraction: float = Field(ge=0.0, le=1.0)
    cpu_utilization: List[float]
    stations: List[StationStats]
    priority_inversions: int
    latency_samples: Dict[str, List[float]] = Field(default_factory=dict, exclude=True)

    @property
    def completion_ratio(self) -> float:
        if self.generated_packet_ins == 0:
            return 1.0
        return self.completed_packet_ins / self.generated_packet_ins

    def p95(self, event_class: str) -> float:
        summary = self.latency_quantiles.get(event_class)
        return summary.p95 if summary else 0.0


class SaturationPoint(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    rate: float
    offered_rate: float
    throughput: float
    completion_ratio: float
