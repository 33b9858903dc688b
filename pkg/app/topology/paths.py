# app/topology/paths.py
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable

import networkx as nx

from app.topology.fat_tree import FatTreeTopology


@dataclass
class ShortestPaths:
    # source -> switch -> distance (math.inf when unreachable)
    distance: Dict[int, Dict[int, float]] = field(default_factory=dict)
    # source -> switch -> predecessor on the chosen path (None for the source and unreachable switches)
    parent: Dict[int, Dict[int, int | None]] = field(default_factory=dict)

    def dist(self, source: int, target: int) -> float:
        return self.distance[source][target]


def shortest_paths(topology: FatTreeTopology, sources: Iterable[int]) -> ShortestPaths:
    """Dijkstra over up links with unit costs; among equal predecessors the lowest switch id wins."""
    view = topology.up_view()
    result = ShortestPaths()
    nodes = topology.switches()

    for source in sources:
        reached = nx.single_source_dijkstra_path_length(view, source, weight="cost")
        dist = {n: float(reached.get(n, math.inf)) for n in nodes}
        parent: Dict[int, int | None] = {n: None for n in nodes}
        for v, d in reached.items():
            if v == source:
                continue
            parent[v] = min(
                u for u in view.neighbors(v)
                if dist[u] + view[u][v]["cost"] == d
            )
        result.distance[source] = dist
        result.parent[source] = parent
    return result
