# topology_service.py (facade)
from __future__ import annotations

from app.topology.failures import LinkFailureEvent, border_link_fraction, sample_link_failure, sample_link_failures
from app.topology.fat_tree import FatTreeTopology, build_fat_tree, build_from_edges
from app.topology.paths import ShortestPaths, shortest_paths
from app.topology.pod_partitioning import PodPartitioning, partition_pods, valid_partition_counts

__all__ = [
    "FatTreeTopology",
    "PodPartitioning",
    "LinkFailureEvent",
    "ShortestPaths",
    "build_fat_tree",
    "build_from_edges",
    "partition_pods",
    "valid_partition_counts",
    "shortest_paths",
    "sample_link_failure",
    "sample_link_failures",
    "border_link_fraction",
]
