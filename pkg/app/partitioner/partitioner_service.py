# partitioner_service.py (facade)
from __future__ import annotations

from app.partitioner.coarsen import CoarseLevel, coarsen, contract, match_heavy_edges
from app.partitioner.multilevel import partition
from app.partitioner.refine import refine
from app.partitioner.weighted_graph import (
    BalanceSpec,
    PartitionResult,
    WeightedGraph,
    parse_edge_list,
    read_edge_list,
)

__all__ = [
    "WeightedGraph",
    "BalanceSpec",
    "PartitionResult",
    "CoarseLevel",
    "partition",
    "coarsen",
    "match_heavy_edges",
    "contract",
    "refine",
    "parse_edge_list",
    "read_edge_list",
]
