# app/topology/pod_partitioning.py
from __future__ import annotations

from typing import List, Tuple

from pydantic import BaseModel, ConfigDict

from app.errors import StructuralError
from app.topology.fat_tree import FatTreeTopology


def valid_partition_counts(pods: int) -> List[int]:
    return [d for d in range(1, pods + 1) if pods % d == 0]


class PodPartitioning(BaseModel):
    """Contiguous pod groups; core switches are split into P even contiguous blocks."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    partition_count: int
    pod_to_partition: Tuple[int, ...]
    core_to_partition: Tuple[int, ...] = ()

    def partition_of(self, topology: FatTreeTopology, switch: int) -> int:
        pod = topology.pod_of(switch)
        if pod is None:
            return self.core_to_partition[switch]
        return self.pod_to_partition[pod]

    def partition_switches(self, topology: FatTreeTopology) -> List[List[int]]:
        members: List[List[int]] = [[] for _ in range(self.partition_count)]
        for switch in topology.switches():
            members[self.partition_of(topology, switch)].append(switch)
        return members

    def partition_sizes(self, topology: FatTreeTopology) -> List[int]:
        return [len(m) for m in self.partition_switches(topology)]


def partition_pods(topology: FatTreeTopology, partition_count: int) -> PodPartitioning:
    pods = topology.pods
    if partition_count <= 0 or pods % partition_count != 0:
        raise StructuralError(
            f"Partition count must divide the pod count [P={partition_count}, pods={pods}, "
            f"valid={valid_partition_counts(pods)}]"
        )
    per = pods // partition_count
    cores = topology.switches("core")
    core_map = [0] * (max(cores) + 1 if cores else 0)
    for rank, c in enumerate(cores):
        core_map[c] = rank * partition_count // len(cores)

    return PodPartitioning(
        partition_count=partition_count,
        pod_to_partition=tuple(p // per for p in range(pods)),
        core_to_partition=tuple(core_map),
    )
