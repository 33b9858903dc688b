# app/placement/feasibility.py
from __future__ import annotations

import logging
from typing import List

from app.commgraph.graph_cost import event_cost, weighted_latency
from app.commgraph.graph_models import CommGraph
from app.errors import StructuralError
from app.placement.placement_models import FeasibilityReport, Placement, ServerSpec

log = logging.getLogger(__name__)


def validate_placement(graph: CommGraph, spec: ServerSpec, placement: Placement) -> None:
    if len(placement.assignment) != len(graph.slices):
        raise StructuralError(
            f"Placement length mismatch [assignment={len(placement.assignment)}, slices={len(graph.slices)}]"
        )
    for idx, server in enumerate(placement.assignment):
        if server < 0 or server >= spec.count:
            raise StructuralError(
                f"Server index out of range [slice={graph.slices[idx].label()}, server={server}, servers={spec.count}]"
            )


def server_loads(graph: CommGraph, spec: ServerSpec, placement: Placement) -> tuple[List[float], List[float]]:
    cpu = [0.0] * spec.count
    mem = [0.0] * spec.count
    for item, server in zip(graph.slices, placement.assignment):
        cpu[server] += item.cpu_demand
        mem[server] += item.mem_demand
    return cpu, mem


def isolation_conflicts(graph: CommGraph, spec: ServerSpec, placement: Placement) -> List[int]:
    groups: list[set[str]] = [set() for _ in range(spec.count)]
    for item, server in zip(graph.slices, placement.assignment):
        if item.colocation_group is not None:
            groups[server].add(item.colocation_group)
    return [server for server, names in enumerate(groups) if len(names) > 1]


def check_feasibility(graph: CommGraph, spec: ServerSpec, placement: Placement) -> FeasibilityReport:
    validate_placement(graph, spec, placement)
    cpu, mem = server_loads(graph, spec, placement)
    conflicts = isolation_conflicts(graph, spec, placement)

    violated = [
        event.event_id
        for event in graph.events
        if event.deadline_ms is not None and event_cost(graph, placement, event) > event.deadline_ms
    ]

    report = FeasibilityReport(
        cpu_ok=max(cpu) <= spec.cpu_capacity,
        mem_ok=max(mem) <= spec.mem_capacity,
        deadlines_ok=not violated,
        isolation_ok=not conflicts,
        per_server_cpu=cpu,
        per_server_mem=mem,
        violated_events=violated,
        isolation_conflicts=conflicts,
    )
    if violated:
        log.warning("Deadline violations found [events=%s]", ",".join(violated))
    return report


def objective(graph: CommGraph, placement: Placement) -> float:
    return weighted_latency(graph, placement)
