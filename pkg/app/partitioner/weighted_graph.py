# app/partitioner/weighted_graph.py
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.errors import ConfigError, StructuralError

Weights = Tuple[float, float]
WeightedEdge = Tuple[int, int, float]


@dataclass(frozen=True)
class WeightedGraph:
    """Partitioner input: per-vertex <cpu, mem> weights, weighted undirected edges, optional group labels."""

    vertex_weights: Tuple[Weights, ...]
    edges: Tuple[WeightedEdge, ...] = ()
    groups: Tuple[str | None, ...] = ()

    def __post_init__(self) -> None:
        n = len(self.vertex_weights)
        if self.groups and len(self.groups) != n:
            raise StructuralError(f"Group labels do not match vertices [groups={len(self.groups)}, vertices={n}]")
        for idx, (cpu, mem) in enumerate(self.vertex_weights):
            if cpu < 0 or mem < 0:
                raise StructuralError(f"Negative vertex weight [vertex={idx}]")
        for u, v, w in self.edges:
            if u == v:
                raise StructuralError(f"Self-loop edge [vertex={u}]")
            if not (0 <= u < n and 0 <= v < n):
                raise StructuralError(f"Edge references unknown vertex [edge=({u}, {v})]")
            if w < 0:
                raise StructuralError(f"Negative edge weight [edge=({u}, {v})]")

    @property
    def n(self) -> int:
        return len(self.vertex_weights)

    def group_of(self, v: int) -> str | None:
        return self.groups[v] if self.groups else None

    def to_networkx(self) -> nx.Graph:
        """Adjacency view; parallel edges collapse into one edge with summed weight."""
        g = nx.Graph()
        for v, weights in enumerate(self.vertex_weights):
            g.add_node(v, weight=weights, group=self.group_of(v))
        for u, v, w in self.edges:
            if g.has_edge(u, v):
                g[u][v]["weight"] += w
            else:
                g.add_edge(u, v, weight=w)
        return g

    def cut_weight(self, assignment: List[int] | Tuple[int, ...]) -> float:
        return sum(w for u, v, w in self.edges if assignment[u] != assignment[v])

    def totals(self) -> Weights:
        return (
            sum(w[0] for w in self.vertex_weights),
            sum(w[1] for w in self.vertex_weights),
        )


class BalanceSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    parts: int = Field(ge=1)
    capacity: Tuple[float, float]
    slack: Tuple[float, float] = (1.0, 1.0)

    @model_validator(mode="after")
    def _check_bounds(self) -> "BalanceSpec":
        if min(self.capacity) <= 0:
            raise ValueError("capacities must be positive")
        if min(self.slack) < 1.0:
            raise ValueError("slack must be at least 1.0")
        return self

    @property
    def limits(self) -> Weights:
        return (self.capacity[0] * self.slack[0], self.capacity[1] * self.slack[1])


class PartitionResult(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    assignment: Tuple[int, ...]
    cut_weight: float
    per_part_loads: List[List[float]]
    feasible: bool
    message: str | None = None
    trial: int = 0


def part_loads(graph: WeightedGraph, assignment: List[int] | Tuple[int, ...], parts: int) -> List[List[float]]:
    loads = [[0.0, 0.0] for _ in range(parts)]
    for v, (cpu, mem) in enumerate(graph.vertex_weights):
        loads[assignment[v]][0] += cpu
        loads[assignment[v]][1] += mem
    return loads


def group_conflict(graph: WeightedGraph, assignment: List[int] | Tuple[int, ...], parts: int) -> bool:
    seen: list[str | None] = [None] * parts
    for v in range(graph.n):
        g = graph.group_of(v)
        if g is None:
            continue
        part = assignment[v]
        if seen[part] is None:
            seen[part] = g
        elif seen[part] != g:
            return True
    return False


def evaluate(
    graph: WeightedGraph,
    assignment: List[int] | Tuple[int, ...],
    spec: BalanceSpec,
    message: str | None = None,
    trial: int = 0,
) -> PartitionResult:
    loads = part_loads(graph, assignment, spec.parts)
    limits = spec.limits
    feasible = all(load[0] <= limits[0] and load[1] <= limits[1] for load in loads)
    if feasible and group_conflict(graph, assignment, spec.parts):
        feasible = False
        message = message or "co-location groups share a part"
    return PartitionResult(
        assignment=tuple(assignment),
        cut_weight=graph.cut_weight(assignment),
        per_part_loads=loads,
        feasible=feasible,
        message=message,
        trial=trial,
    )


def _data_lines(text: str) -> List[List[str]]:
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    return rows


def parse_edge_list(text: str) -> WeightedGraph:
    """Header "n m", then n lines "w_cpu w_mem", then m lines "u v w"; '#' starts a comment."""
    rows = _data_lines(text)
    if not rows or len(rows[0]) != 2:
        raise ConfigError("Edge list needs a header line 'n m'")
    try:
        n, m = int(rows[0][0]), int(rows[0][1])
        body = rows[1:]
        if len(body) != n + m:
            raise ConfigError(f"Edge list length mismatch [expected={n + m}, found={len(body)}]")
        weights = tuple((float(r[0]), float(r[1])) for r in body[:n])
        edges = tuple((int(r[0]), int(r[1]), float(r[2])) for r in body[n:])
    except (ValueError, IndexError) as exc:
        raise ConfigError(f"Malformed edge list: {exc}") from exc
    return WeightedGraph(vertex_weights=weights, edges=edges)


def read_edge_list(path: str | Path) -> WeightedGraph:
    source = Path(path)
    try:
        return parse_edge_list(source.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"Edge list unreadable [path={source}]") from exc
