# app/placement/placement_models.py
from __future__ import annotations

from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, Field


class ServerSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    count: int = Field(ge=1)
    cpu_capacity: float = Field(default=1.0, gt=0.0)
    mem_capacity: float = Field(gt=0.0)


class Placement(BaseModel):
    """Assignment vector F: slice index -> server index."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    assignment: Tuple[int, ...]


class FeasibilityReport(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    cpu_ok: bool
    mem_ok: bool
    deadlines_ok: bool
    isolation_ok: bool = True
    per_server_cpu: List[float]
    per_server_mem: List[float]
    violated_events: List[str] = []
    isolation_conflicts: List[int] = []

    @property
    def capacity_ok(self) -> bool:
        return self.cpu_ok and self.mem_ok and self.isolation_ok

    @property
    def all_ok(self) -> bool:
        return self.capacity_ok and self.deadlines_ok


class ExactSolution(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    placement: Placement | None
    objective: float | None
    feasible: bool
    explored_nodes: int = 0
