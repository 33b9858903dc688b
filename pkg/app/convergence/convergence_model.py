# app/convergence/convergence_model.py
from __future__ import annotations

import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from app.errors import StructuralError
from app.settings import settings
from app.topology.failures import FailureKind, LinkFailureEvent, border_link_fraction
from app.topology.fat_tree import FatTreeTopology
from app.topology.pod_partitioning import PodPartitioning

RoundsRule = Literal["broadcast", "flat"]


class ConvergenceModel(BaseModel):
    """
    Two opposing terms: local Dijkstra work (compute_coeff x n ln n per
    partition) and inter-partition advertisement rounds.

    ``broadcast``: a border failure is advertised to all P-1 other partitions,
    serialised; a local failure costs one advertisement. ``flat``: every failure
    costs one advertisement when P > 1.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    compute_coeff: float = Field(default_factory=lambda: settings.compute_coeff_s, gt=0.0)
    advert_latency: float = Field(default_factory=lambda: settings.advert_latency_s, gt=0.0)
    rounds_rule: RoundsRule = "broadcast"

    def compute_time(self, switches: int) -> float:
        if switches <= 1:
            return 0.0
        return self.compute_coeff * switches * math.log(switches)

    def advert_messages(self, kind: FailureKind, partition_count: int) -> int:
        if partition_count <= 1:
            return 0
        if kind == "border" and self.rounds_rule == "broadcast":
            return partition_count - 1
        return 1


class ConvergenceSample(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    partition_count: int
    failure: LinkFailureEvent
    total_time: float = Field(ge=0.0)
    compute_time: float = Field(ge=0.0)
    comm_time: float = Field(ge=0.0)


def measure_convergence(
    topology: FatTreeTopology,
    partitioning: PodPartitioning,
    failure: LinkFailureEvent,
    model: ConvergenceModel,
    sizes: list[int] | None = None,
) -> ConvergenceSample:
    """Recompute makespan after one link failure: parallel local Dijkstra, then serialised advertisements."""
    u, v = failure.link
    if not topology.is_up(u, v):
        raise StructuralError(f"Failure targets a link that is already down [link=({u}, {v})]")

    part_sizes = sizes if sizes is not None else partitioning.partition_sizes(topology)
    parts = partitioning.partition_count
    if failure.kind == "border":
        compute = max(model.compute_time(n) for n in part_sizes)
    else:
        owner = partitioning.partition_of(topology, u)
        compute = model.compute_time(part_sizes[owner])

    comm = model.advert_latency * model.advert_messages(failure.kind, parts)
    return ConvergenceSample(
        partition_count=parts,
        failure=failure,
        total_time=compute + comm,
        compute_time=compute,
        comm_time=comm,
    )


def expected_convergence_time(
    topology: FatTreeTopology,
    partitioning: PodPartitioning,
    model: ConvergenceModel,
) -> float:
    """Mean total_time over the topology's border/local link mix (largest partition for compute)."""
    b = border_link_fraction(topology)
    parts = partitioning.partition_count
    compute = model.compute_time(max(partitioning.partition_sizes(topology)))
    comm = model.advert_latency * (
        b * model.advert_messages("border", parts) + (1.0 - b) * model.advert_messages("local", parts)
    )
    return compute + comm
