# app/partitioner/refine.py
from __future__ import annotations

import logging
from typing import List, Sequence

import networkx as nx

from app.partitioner.initial import PartState
from app.partitioner.weighted_graph import BalanceSpec, WeightedGraph
from app.settings import settings

log = logging.getLogger(__name__)

_EPS = 1e-12


def _state_for(graph: WeightedGraph, spec: BalanceSpec, assignment: Sequence[int]) -> PartState:
    state = PartState(graph, spec)
    for v, part in enumerate(assignment):
        state.add(v, part)
    return state


def _connections(adj: nx.Graph, assignment: Sequence[int], v: int, parts: int) -> List[float]:
    conn = [0.0] * parts
    for u in adj.neighbors(v):
        conn[assignment[u]] += adj[v][u]["weight"]
    return conn


def _is_boundary(adj: nx.Graph, assignment: Sequence[int], v: int) -> bool:
    return any(assignment[u] != assignment[v] for u in adj.neighbors(v))


def _feasible(state: PartState) -> bool:
    return all(
        load[0] <= state.limits[0] and load[1] <= state.limits[1]
        for load in state.loads
    )


def _cut_pass(adj: nx.Graph, state: PartState, assignment: List[int], parts: int) -> int:
    moves = 0
    for v in [v for v in range(len(assignment)) if _is_boundary(adj, assignment, v)]:
        home = assignment[v]
        conn = _connections(adj, assignment, v, parts)
        best_part, best_gain = -1, _EPS
        for part in range(parts):
            if part == home or not state.compatible(v, part) or not state.fits(v, part):
                continue
            gain = conn[part] - conn[home]
            if gain > best_gain:
                best_part, best_gain = part, gain
        if best_part >= 0:
            state.remove(v, home)
            state.add(v, best_part)
            assignment[v] = best_part
            moves += 1
    return moves


def _swap_fits(state: PartState, v: int, pv: int, u: int, pu: int) -> bool:
    state.remove(v, pv)
    state.remove(u, pu)
    ok = state.compatible(v, pu) and state.fits(v, pu)
    if ok:
        state.add(v, pu)
        ok = state.compatible(u, pv) and state.fits(u, pv)
        state.remove(v, pu)
    state.add(u, pu)
    state.add(v, pv)
    return ok


def _swap_pass(adj: nx.Graph, state: PartState, assignment: List[int], parts: int) -> int:
    """Pairwise exchanges between boundary vertices of different parts that strictly lower the cut."""
    moves = 0
    boundary = [v for v in range(len(assignment)) if _is_boundary(adj, assignment, v)]
    for v in boundary:
        pv = assignment[v]
        conn_v = _connections(adj, assignment, v, parts)
        best_u, best_gain = -1, _EPS
        for u in boundary:
            pu = assignment[u]
            if pu == pv:
                continue
            conn_u = _connections(adj, assignment, u, parts)
            shared = adj[v][u]["weight"] if adj.has_edge(v, u) else 0.0
            gain = (conn_v[pu] - conn_v[pv]) + (conn_u[pv] - conn_u[pu]) - 2.0 * shared
            if gain > best_gain and _swap_fits(state, v, pv, u, pu):
                best_u, best_gain = u, gain
        if best_u >= 0:
            pu = assignment[best_u]
            state.remove(v, pv)
            state.remove(best_u, pu)
            state.add(v, pu)
            state.add(best_u, pv)
            assignment[v], assignment[best_u] = pu, pv
            moves += 1
    return moves


def _overflow_pass(adj: nx.Graph, state: PartState, assignment: List[int], parts: int) -> int:
    moves = 0
    overloaded = {p for p in range(parts) if state.overflow(p) > 0.0}
    for v in [v for v in range(len(assignment)) if assignment[v] in overloaded]:
        home = assignment[v]
        if state.overflow(home) <= 0.0:
            continue
        conn = _connections(adj, assignment, v, parts)
        before = state.overflow(home)
        best_part, best_key = -1, None
        for part in range(parts):
            if part == home or not state.compatible(v, part):
                continue
            base = state.overflow(part)
            state.remove(v, home)
            state.add(v, part)
            relief = (before + base) - (state.overflow(home) + state.overflow(part))
            state.remove(v, part)
            state.add(v, home)
            if relief <= _EPS:
                continue
            key = (relief, conn[part] - conn[home])
            if best_key is None or key > best_key:
                best_part, best_key = part, key
        if best_part >= 0:
            state.remove(v, home)
            state.add(v, best_part)
            assignment[v] = best_part
            moves += 1
    return moves


def refine(
    graph: WeightedGraph,
    assignment: Sequence[int],
    spec: BalanceSpec,
    passes: int | None = None,
) -> List[int]:
    """
    Boundary refinement with single-vertex moves, then pairwise swaps once no
    single move helps.

    A feasible assignment only accepts moves and swaps that strictly lower the
    cut and keep every part within capacity x slack, so the cut never rises and
    feasibility is never lost. An infeasible assignment first accepts moves out
    of overloaded parts that lower the total overflow.
    """
    limit = settings.refine_passes if passes is None else passes
    adj = graph.to_networkx()
    current = list(assignment)
    state = _state_for(graph, spec, current)

    for idx in range(limit):
        if _feasible(state):
            moves = _cut_pass(adj, state, current, spec.parts)
            if moves == 0:
                moves = _swap_pass(adj, state, current, spec.parts)
        else:
            moves = _overflow_pass(adj, state, current, spec.parts)
            if moves == 0:
                moves = _cut_pass(adj, state, current, spec.parts)
        if moves == 0:
            log.debug("Refinement settled [pass=%s]", idx)
            break

    return current
