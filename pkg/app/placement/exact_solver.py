# app/placement/exact_solver.py
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Tuple

from app.commgraph.graph_cost import edge_coefficients, weighted_latency
from app.commgraph.graph_models import CommGraph
from app.errors import InstanceTooLargeError
from app.placement.placement_models import ExactSolution, Placement, ServerSpec
from app.settings import settings

log = logging.getLogger(__name__)

_PRUNE_EPS = 1e-12


@dataclass
class _SearchState:
    assignment: List[int]
    cpu: List[float]
    mem: List[float]
    group: List[str | None]
    group_count: List[int]
    event_cost: List[float]
    best_cut: float = float("inf")
    best: Tuple[int, ...] | None = None
    explored: int = 0
    used: int = 0


@dataclass
class _Instance:
    # Edges whose higher endpoint is v, as (lower endpoint, cut weight).
    back_edges: List[List[Tuple[int, float]]]
    # Deadline-carrying event traversals closed at v, as (lower endpoint, event slot, cost).
    back_deadlines: List[List[Tuple[int, int, float]]]
    deadlines: List[float] = field(default_factory=list)


def _build_instance(graph: CommGraph, enforce_deadlines: bool) -> _Instance:
    n = len(graph.slices)
    alpha = edge_coefficients(graph)
    back_edges: List[List[Tuple[int, float]]] = [[] for _ in range(n)]
    for idx, coeff in sorted(alpha.items()):
        edge = graph.edges[idx]
        weight = coeff * edge.cost_ms
        if weight > 0.0:
            low, high = edge.pair
            back_edges[high].append((low, weight))

    back_deadlines: List[List[Tuple[int, int, float]]] = [[] for _ in range(n)]
    deadlines: List[float] = []
    if enforce_deadlines:
        for event in graph.events:
            if event.deadline_ms is None:
                continue
            slot = len(deadlines)
            deadlines.append(event.deadline_ms)
            for idx in event.edges:
                edge = graph.edges[idx]
                low, high = edge.pair
                back_deadlines[high].append((low, slot, edge.cost_ms))

    return _Instance(back_edges=back_edges, back_deadlines=back_deadlines, deadlines=deadlines)


def solve_exact(
    graph: CommGraph,
    spec: ServerSpec,
    enforce_deadlines: bool = False,
    ceiling: int | None = None,
) -> ExactSolution:
    """
    Depth-first branch and bound over slice-index prefixes.

    Servers are opened in order (slice v may only use servers 0..used), which
    canonicalises relabel-equivalent placements. The bound is the cut weight of
    the prefix; a branch is dropped once it reaches the incumbent, so the first
    optimum found is also the lexicographically smallest one.
    """
    limit = settings.exact_ceiling if ceiling is None else ceiling
    n = len(graph.slices)
    if n > limit:
        raise InstanceTooLargeError(n, limit)

    if n == 0:
        return ExactSolution(placement=Placement(assignment=()), objective=0.0, feasible=True)

    inst = _build_instance(graph, enforce_deadlines)
    cpu_demand = [s.cpu_demand for s in graph.slices]
    mem_demand = [s.mem_demand for s in graph.slices]
    groups = [s.colocation_group for s in graph.slices]

    state = _SearchState(
        assignment=[-1] * n,
        cpu=[0.0] * spec.count,
        mem=[0.0] * spec.count,
        group=[None] * spec.count,
        group_count=[0] * spec.count,
        event_cost=[0.0] * len(inst.deadlines),
    )

    def _visit(v: int, cut: float) -> None:
        state.explored += 1
        if v == n:
            if cut < state.best_cut - _PRUNE_EPS:
                state.best_cut = cut
                state.best = tuple(state.assignment)
            return

        top = min(state.used + 1, spec.count)
        for server in range(top):
            new_cpu = state.cpu[server] + cpu_demand[v]
            new_mem = state.mem[server] + mem_demand[v]
            if new_cpu > spec.cpu_capacity or new_mem > spec.mem_capacity:
                continue
            g = groups[v]
            if g is not None and state.group[server] is not None and state.group[server] != g:
                continue

            added = 0.0
            for u, weight in inst.back_edges[v]:
                if state.assignment[u] != server:
                    added += weight
            if cut + added >= state.best_cut - _PRUNE_EPS:
                continue

            touched: List[Tuple[int, float]] = []
            late = False
            for u, slot, cost in inst.back_deadlines[v]:
                if state.assignment[u] != server:
                    touched.append((slot, state.event_cost[slot]))
                    state.event_cost[slot] += cost
                    if state.event_cost[slot] > inst.deadlines[slot]:
                        late = True

            if not late:
                prev_cpu, prev_mem = state.cpu[server], state.mem[server]
                opened = server == state.used
                state.assignment[v] = server
                state.cpu[server] = new_cpu
                state.mem[server] = new_mem
                if g is not None:
                    if state.group_count[server] == 0:
                        state.group[server] = g
                    state.group_count[server] += 1
                if opened:
                    state.used += 1

                _visit(v + 1, cut + added)

                if opened:
                    state.used -= 1
                if g is not None:
                    state.group_count[server] -= 1
                    if state.group_count[server] == 0:
                        state.group[server] = None
                state.cpu[server] = prev_cpu
                state.mem[server] = prev_mem
                state.assignment[v] = -1

            for slot, previous in reversed(touched):
                state.event_cost[slot] = previous

    _visit(0, 0.0)

    if state.best is None:
        log.info("Exact solve found no feasible placement [slices=%s, servers=%s, nodes=%s]", n, spec.count, state.explored)
        return ExactSolution(placement=None, objective=None, feasible=False, explored_nodes=state.explored)

    placement = Placement(assignment=state.best)
    value = weighted_latency(graph, placement)
    log.debug("Exact solve done [slices=%s, servers=%s, objective=%.6f, nodes=%s]", n, spec.count, value, state.explored)
    return ExactSolution(placement=placement, objective=value, feasible=True, explored_nodes=state.explored)
