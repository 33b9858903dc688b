# app/commgraph/graph_cost.py
from __future__ import annotations

from collections import defaultdict
from typing import Dict, Sequence, Tuple

from app.commgraph.graph_models import CommGraph, EventPath
from app.errors import StructuralError
from app.partitioner.weighted_graph import WeightedGraph
from app.placement.placement_models import Placement


def _server_of(graph: CommGraph, assignment: Sequence[int], slice_idx: int) -> int:
    if slice_idx >= len(assignment):
        raise StructuralError(f"Slice is not placed [slice={graph.slices[slice_idx].label()}]")
    return assignment[slice_idx]


def event_cost(graph: CommGraph, placement: Placement, event: EventPath) -> float:
    """Path latency: sum of d_ij over path edges whose endpoints sit on different servers."""
    assignment = placement.assignment
    total = 0.0
    for idx in event.edges:
        edge = graph.edges[idx]
        if _server_of(graph, assignment, edge.src) != _server_of(graph, assignment, edge.dst):
            total += edge.cost_ms
    return total


def weighted_latency(graph: CommGraph, placement: Placement) -> float:
    return sum(event.weight * event_cost(graph, placement, event) for event in graph.events)


def edge_coefficients(graph: CommGraph) -> Dict[int, float]:
    """alpha_ij: event weight times the number of traversals, summed over events."""
    alpha: Dict[int, float] = defaultdict(float)
    for event in graph.events:
        for idx in event.edges:
            alpha[idx] += event.weight
    return dict(alpha)


def to_partition_graph(graph: CommGraph) -> WeightedGraph:
    alpha = edge_coefficients(graph)
    edges: list[Tuple[int, int, float]] = []
    for idx in sorted(alpha):
        weight = alpha[idx] * graph.edges[idx].cost_ms
        if weight <= 0.0:
            continue
        edge = graph.edges[idx]
        u, v = edge.pair
        edges.append((u, v, weight))

    return WeightedGraph(
        vertex_weights=tuple((s.cpu_demand, s.mem_demand) for s in graph.slices),
        edges=tuple(edges),
        groups=tuple(s.colocation_group for s in graph.slices),
    )
