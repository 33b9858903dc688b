# app/partitioner/initial.py
from __future__ import annotations

import logging
from typing import List

import numpy as np

from app.partitioner.weighted_graph import BalanceSpec, WeightedGraph
from app.settings import settings

log = logging.getLogger(__name__)

_EPS = 1e-12


class PartState:
    """Running per-part loads and group occupancy while vertices are placed or moved."""

    def __init__(self, graph: WeightedGraph, spec: BalanceSpec) -> None:
        self.graph = graph
        self.limits = spec.limits
        self.loads = [[0.0, 0.0] for _ in range(spec.parts)]
        self.group_counts: List[dict[str, int]] = [{} for _ in range(spec.parts)]

    def add(self, v: int, part: int) -> None:
        cpu, mem = self.graph.vertex_weights[v]
        self.loads[part][0] += cpu
        self.loads[part][1] += mem
        g = self.graph.group_of(v)
        if g is not None:
            self.group_counts[part][g] = self.group_counts[part].get(g, 0) + 1

    def remove(self, v: int, part: int) -> None:
        cpu, mem = self.graph.vertex_weights[v]
        self.loads[part][0] -= cpu
        self.loads[part][1] -= mem
        g = self.graph.group_of(v)
        if g is not None:
            self.group_counts[part][g] -= 1
            if self.group_counts[part][g] == 0:
                del self.group_counts[part][g]

    def compatible(self, v: int, part: int) -> bool:
        g = self.graph.group_of(v)
        if g is None:
            return True
        return all(name == g for name in self.group_counts[part])

    def fits(self, v: int, part: int) -> bool:
        cpu, mem = self.graph.vertex_weights[v]
        load = self.loads[part]
        return load[0] + cpu <= self.limits[0] and load[1] + mem <= self.limits[1]

    def remaining_after(self, v: int, part: int) -> float:
        cpu, mem = self.graph.vertex_weights[v]
        load = self.loads[part]
        return min(
            (self.limits[0] - load[0] - cpu) / self.limits[0],
            (self.limits[1] - load[1] - mem) / self.limits[1],
        )

    def overflow(self, part: int) -> float:
        load = self.loads[part]
        return max(0.0, load[0] - self.limits[0]) / self.limits[0] + max(0.0, load[1] - self.limits[1]) / self.limits[1]

    def total_overflow(self) -> float:
        return sum(self.overflow(p) for p in range(len(self.loads)))


def _heaviness(graph: WeightedGraph, spec: BalanceSpec, v: int) -> float:
    cpu, mem = graph.vertex_weights[v]
    return max(cpu / spec.capacity[0], mem / spec.capacity[1])


def _fallback_part(state: PartState, v: int, parts: int) -> int:
    compatible = [p for p in range(parts) if state.compatible(v, p)]
    pool = compatible or list(range(parts))
    return max(pool, key=lambda p: (state.remaining_after(v, p), -p))


def greedy_partition(graph: WeightedGraph, spec: BalanceSpec) -> List[int]:
    """Heaviest vertex first, into the part left with the most remaining capacity."""
    order = sorted(range(graph.n), key=lambda v: (-_heaviness(graph, spec, v), v))
    state = PartState(graph, spec)
    assignment = [0] * graph.n
    for v in order:
        candidates = [p for p in range(spec.parts) if state.compatible(v, p) and state.fits(v, p)]
        if candidates:
            part = max(candidates, key=lambda p: (state.remaining_after(v, p), -p))
        else:
            part = _fallback_part(state, v, spec.parts)
        assignment[v] = part
        state.add(v, part)
    return assignment


def _share(spec: BalanceSpec, load: List[float]) -> float:
    return max(load[0] / spec.capacity[0], load[1] / spec.capacity[1])


def grow_partition(
    graph: WeightedGraph,
    spec: BalanceSpec,
    rng: np.random.Generator,
    fill: bool = False,
) -> List[int]:
    """
    Graph growing from a random seed vertex per part. Each step adds the
    unassigned vertex with the best gain (edge weight into the part minus edge
    weight to still-unassigned vertices). A part stops growing at its balanced
    share of the total load, or at capacity when ``fill`` is set; the last part
    takes whatever fits and leftovers go to the roomiest compatible part.
    """
    adj = graph.to_networkx()
    state = PartState(graph, spec)
    assignment = [-1] * graph.n
    totals = graph.totals()
    target = _share(spec, [totals[0], totals[1]]) / spec.parts

    for part in range(spec.parts):
        last = part == spec.parts - 1
        free = [v for v in range(graph.n) if assignment[v] < 0]
        if not free:
            break
        seeds = [v for v in free if state.compatible(v, part) and state.fits(v, part)]
        if not seeds:
            continue
        start = seeds[int(rng.integers(len(seeds)))]
        assignment[start] = part
        state.add(start, part)

        while fill or last or _share(spec, state.loads[part]) < target:
            best_v, best_gain = -1, float("-inf")
            for v in range(graph.n):
                if assignment[v] >= 0 or not state.compatible(v, part) or not state.fits(v, part):
                    continue
                gain = 0.0
                for u in adj.neighbors(v):
                    w = adj[v][u]["weight"]
                    if assignment[u] == part:
                        gain += w
                    elif assignment[u] < 0:
                        gain -= w
                if gain > best_gain:
                    best_v, best_gain = v, gain
            if best_v < 0:
                break
            assignment[best_v] = part
            state.add(best_v, part)

    for v in range(graph.n):
        if assignment[v] < 0:
            candidates = [p for p in range(spec.parts) if state.compatible(v, p) and state.fits(v, p)]
            if candidates:
                part = max(candidates, key=lambda p: (state.remaining_after(v, p), -p))
            else:
                part = _fallback_part(state, v, spec.parts)
            assignment[v] = part
            state.add(v, part)
    return assignment


def search_partition(
    graph: WeightedGraph,
    spec: BalanceSpec,
    budget: int | None = None,
) -> List[int] | None:
    """
    Bounded depth-first branch and bound over part choices.

    Vertices are taken heaviest first, the bin-packing order, and each tries
    the parts that add the least cut first. Parts are interchangeable, so a
    vertex may open at most one new part. A branch is dropped once its cut
    reaches the incumbent. The search stops after ``budget`` nodes and returns
    the best complete assignment seen, or None when it reached none.
    """
    limit = settings.partition_search_budget if budget is None else budget
    n = graph.n
    if n == 0:
        return []

    order = sorted(range(n), key=lambda v: (-_heaviness(graph, spec, v), v))
    position = {v: i for i, v in enumerate(order)}
    adj = graph.to_networkx()
    # edges from each vertex back to the ones placed before it
    back = [
        [(u, adj[v][u]["weight"]) for u in sorted(adj.neighbors(v)) if position[u] < position[v]]
        for v in order
    ]

    state = PartState(graph, spec)
    assignment = [-1] * n
    best: List[int] | None = None
    best_cut = float("inf")
    nodes = 0

    def descend(depth: int, used: int, cut: float) -> None:
        nonlocal best, best_cut, nodes
        if depth == n:
            best, best_cut = list(assignment), cut
            return
        v = order[depth]
        options = []
        for part in range(min(used + 1, spec.parts)):
            if not state.compatible(v, part) or not state.fits(v, part):
                continue
            added = sum(w for u, w in back[depth] if assignment[u] != part)
            options.append((added, part))
        options.sort()

        for added, part in options:
            if nodes >= limit or cut + added >= best_cut - _EPS:
                break
            nodes += 1
            assignment[v] = part
            state.add(v, part)
            descend(depth + 1, max(used, part + 1), cut + added)
            state.remove(v, part)
            assignment[v] = -1

    descend(0, 0, 0.0)
    log.debug("Partition search done [vertices=%s, parts=%s, nodes=%s, cut=%s]", n, spec.parts, nodes, best_cut)
    return best
