# app/simengine/demand_profile.py
from __future__ import annotations

import math
from typing import List

from pydantic import BaseModel, ConfigDict, Field

from app.simengine.sim_models import AppModel, PriorityClass, ServiceDistribution

MIB = 1024 ** 2
GIB = 1024 ** 3

REFERENCE_LOAD = 50_000.0  # packet-ins per second at which one server saturates
REFERENCE_SWITCHES = 2560
DJ_ANCHOR_PARTITIONS = 4

IDLE_CPU = 0.15
IDLE_MEM = 512 * MIB
SERVER_MEM = 16 * GIB
# one core per controller instance, minus its idle overhead
SERVER_CPU = 1.0 - IDLE_CPU

# CPU at the reference load; RL and FW scale linearly with load.
RL_CPU = 0.45
FW_CPU = 0.07
HB_CPU = 0.03
DJ_CPU_ANCHOR = 0.25

# Memory for one partition holding every switch; DJ and RL shrink with 1/P.
DJ_MEM = 6.25 * GIB
RL_MEM = 3.75 * GIB
FW_MEM = 1.25 * GIB

# Packet-in handling costs 1/REFERENCE_LOAD s in total, split by CPU share.
PACKET_IN_SERVICE_MS = 1000.0 / REFERENCE_LOAD
RL_SERVICE_MS = PACKET_IN_SERVICE_MS * RL_CPU / (RL_CPU + FW_CPU)
FW_SERVICE_MS = PACKET_IN_SERVICE_MS * FW_CPU / (RL_CPU + FW_CPU)
HB_SERVICE_MS = 0.05


class ProfileTemplate(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    partition_count: int = Field(ge=1)
    load: float = Field(default=REFERENCE_LOAD, ge=0.0)
    total_switches: int = Field(default=REFERENCE_SWITCHES, ge=1)
    dj_service_ms: float | None = Field(default=None, gt=0.0)


class DemandRow(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    app_id: str
    priority_class: PriorityClass
    cpu: float
    mem_bytes: float
    service_time_ms: float | None = None


class DemandProfile(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    partition_count: int
    load: float
    idle_cpu: float = IDLE_CPU
    idle_mem_bytes: float = IDLE_MEM
    rows: List[DemandRow]

    def row(self, app_id: str) -> DemandRow:
        for item in self.rows:
            if item.app_id == app_id:
                return item
        raise KeyError(app_id)

    @property
    def app_ids(self) -> List[str]:
        return [r.app_id for r in self.rows]

    def total_cpu(self) -> float:
        return self.idle_cpu + sum(r.cpu for r in self.rows)

    def app_models(self, service_dist: ServiceDistribution = "deterministic") -> List[AppModel]:
        """Apps with a known service time; route computation always runs for its fixed activation time."""
        return [
            AppModel(
                app_id=r.app_id,
                service_time_ms=r.service_time_ms,
                service_dist="deterministic" if r.priority_class == "compute_intensive" else service_dist,
                cpu_demand=r.cpu,
                mem_demand=r.mem_bytes,
                priority_class=r.priority_class,
            )
            for r in self.rows
            if r.service_time_ms is not None
        ]


def _dijkstra_work(switches: float) -> float:
    return switches * math.log(switches) if switches > 1 else 0.0


def dj_cpu(partition_count: int, total_switches: int = REFERENCE_SWITCHES) -> float:
    """Route-computation CPU per partition, anchored at the four-partition measurement."""
    anchor = _dijkstra_work(total_switches / DJ_ANCHOR_PARTITIONS)
    if anchor <= 0:
        return 0.0
    return DJ_CPU_ANCHOR * _dijkstra_work(total_switches / partition_count) / anchor


def profile_demands(template: ProfileTemplate) -> DemandProfile:
    scale = template.load / REFERENCE_LOAD
    parts = template.partition_count
    rows = [
        DemandRow(app_id="DJ", priority_class="compute_intensive",
                  cpu=dj_cpu(parts, template.total_switches), mem_bytes=DJ_MEM / parts,
                  service_time_ms=template.dj_service_ms),
        DemandRow(app_id="RL", priority_class="latency_sensitive",
                  cpu=RL_CPU * scale, mem_bytes=RL_MEM / parts, service_time_ms=RL_SERVICE_MS),
        DemandRow(app_id="FW", priority_class="latency_sensitive",
                  cpu=FW_CPU * scale, mem_bytes=FW_MEM, service_time_ms=FW_SERVICE_MS),
        DemandRow(app_id="HB", priority_class="real_time",
                  cpu=HB_CPU, mem_bytes=0.0, service_time_ms=HB_SERVICE_MS),
    ]
    return DemandProfile(partition_count=parts, load=template.load, rows=rows)
