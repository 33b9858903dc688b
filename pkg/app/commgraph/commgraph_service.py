# commgraph_service.py (facade over the graph model, cost and file helpers)
from __future__ import annotations

from app.commgraph.graph_cost import edge_coefficients, event_cost, to_partition_graph, weighted_latency
from app.commgraph.graph_io import dump_graph, load_graph, parse_graph
from app.commgraph.graph_models import AppSlice, CommEdge, CommGraph, EventPath

__all__ = [
    "AppSlice",
    "CommEdge",
    "EventPath",
    "CommGraph",
    "event_cost",
    "weighted_latency",
    "edge_coefficients",
    "to_partition_graph",
    "load_graph",
    "parse_graph",
    "dump_graph",
]
