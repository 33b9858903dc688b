# app/partitioner/coarsen.py
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from app.partitioner.weighted_graph import BalanceSpec, WeightedGraph
from app.settings import settings

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoarseLevel:
    graph: WeightedGraph
    # fine vertex -> coarse vertex
    projection: Tuple[int, ...]


def _fits(a: Tuple[float, float], b: Tuple[float, float], spec: BalanceSpec | None) -> bool:
    if spec is None:
        return True
    limits = spec.limits
    return a[0] + b[0] <= limits[0] and a[1] + b[1] <= limits[1]


def match_heavy_edges(
    graph: WeightedGraph,
    rng: np.random.Generator,
    spec: BalanceSpec | None = None,
) -> List[int]:
    """
    Heavy-edge matching. Vertices are visited in a seeded random order; each
    unmatched vertex pairs with the unmatched neighbour behind its heaviest edge
    (lowest index on ties). Only vertices with equal group labels merge, and a
    merge never produces a vertex heavier than one part can hold.

    Returns mate[v] (mate[v] == v for unmatched vertices).
    """
    adj = graph.to_networkx()
    mate = list(range(graph.n))
    matched = [False] * graph.n

    for v in rng.permutation(graph.n).tolist():
        if matched[v]:
            continue
        best_u, best_w = -1, -1.0
        for u in sorted(adj.neighbors(v)):
            if matched[u] or graph.group_of(u) != graph.group_of(v):
                continue
            if not _fits(graph.vertex_weights[u], graph.vertex_weights[v], spec):
                continue
            w = adj[v][u]["weight"]
            if w > best_w:
                best_u, best_w = u, w
        if best_u >= 0:
            mate[v], mate[best_u] = best_u, v
            matched[v] = matched[best_u] = True

    return mate


def contract(graph: WeightedGraph, mate: List[int]) -> CoarseLevel:
    """Merges matched pairs; coarse ids follow the lower fine index of each pair."""
    projection = [-1] * graph.n
    next_id = 0
    for v in range(graph.n):
        if projection[v] < 0:
            projection[v] = next_id
            projection[mate[v]] = next_id
            next_id += 1

    weights = [[0.0, 0.0] for _ in range(next_id)]
    groups: List[str | None] = [None] * next_id
    for v, (cpu, mem) in enumerate(graph.vertex_weights):
        c = projection[v]
        weights[c][0] += cpu
        weights[c][1] += mem
        groups[c] = graph.group_of(v)

    merged: Dict[Tuple[int, int], float] = {}
    for u, v, w in graph.edges:
        cu, cv = projection[u], projection[v]
        if cu == cv:
            continue
        key = (cu, cv) if cu < cv else (cv, cu)
        merged[key] = merged.get(key, 0.0) + w

    coarse = WeightedGraph(
        vertex_weights=tuple((w[0], w[1]) for w in weights),
        edges=tuple((u, v, w) for (u, v), w in sorted(merged.items())),
        groups=tuple(groups) if graph.groups else (),
    )
    return CoarseLevel(graph=coarse, projection=tuple(projection))


def coarsen(
    graph: WeightedGraph,
    seed: int | np.random.Generator,
    spec: BalanceSpec | None = None,
    min_vertices: int | None = None,
    min_reduction: float | None = None,
) -> List[CoarseLevel]:
    """Successively smaller graphs; stops at max(4 x parts, min_vertices) vertices or a level shrinking < min_reduction."""
    rng = np.random.default_rng(seed)
    parts = spec.parts if spec is not None else 1
    floor = max(4 * parts, settings.coarsen_min_vertices if min_vertices is None else min_vertices)
    reduction = settings.coarsen_min_reduction if min_reduction is None else min_reduction

    levels: List[CoarseLevel] = []
    current = graph
    while current.n > floor:
        level = contract(current, match_heavy_edges(current, rng, spec))
        shrink = 1.0 - level.graph.n / current.n
        if shrink <= 0.0:
            break
        levels.append(level)
        current = level.graph
        if shrink < reduction:
            break

    log.debug("Coarsened [levels=%s, vertices=%s->%s]", len(levels), graph.n, current.n)
    return levels
