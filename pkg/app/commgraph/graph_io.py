# app/commgraph/graph_io.py
from __future__ import annotations

import logging
from pathlib import Path
from typing import List

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from app.commgraph.graph_models import AppSlice, CommEdge, CommGraph, EventPath
from app.errors import ConfigError
from app.settings import settings

log = logging.getLogger(__name__)


class SliceDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")

    app: str
    partition: int = Field(ge=0)
    cpu: float = Field(ge=0.0)
    mem_bytes: float = Field(ge=0.0)
    group: str | None = None


class EdgeRefDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")

    from_app: str
    from_partition: int
    to_app: str
    to_partition: int


class EdgeDoc(EdgeRefDoc):
    cost_ms: float | None = Field(default=None, ge=0.0)


class EventDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: str
    weight: float = Field(default=1.0, ge=0.0)
    deadline_ms: float | None = Field(default=None, gt=0.0)
    path: List[EdgeRefDoc] = []


class GraphDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: int = 1
    slices: List[SliceDoc] = []
    edges: List[EdgeDoc] = []
    events: List[EventDoc] = []


def graph_from_doc(doc: GraphDoc, hop_ms: float | None = None) -> CommGraph:
    """Resolves endpoint-pair references into index-based slices, edges and events."""
    default_cost = settings.cross_server_hop_ms if hop_ms is None else hop_ms
    slices = tuple(
        AppSlice(
            app_id=s.app,
            partition_id=s.partition,
            cpu_demand=s.cpu,
            mem_demand=s.mem_bytes,
            colocation_group=s.group,
        )
        for s in doc.slices
    )
    shell = CommGraph(slices=slices)

    edges = tuple(
        CommEdge(
            src=shell.index_of(e.from_app, e.from_partition),
            dst=shell.index_of(e.to_app, e.to_partition),
            cost_ms=default_cost if e.cost_ms is None else e.cost_ms,
        )
        for e in doc.edges
    )
    with_edges = CommGraph(slices=slices, edges=edges)

    events = []
    for ev in doc.events:
        path = tuple(
            with_edges.find_edge(
                with_edges.index_of(ref.from_app, ref.from_partition),
                with_edges.index_of(ref.to_app, ref.to_partition),
            )
            for ref in ev.path
        )
        events.append(EventPath(event_id=ev.id, edges=path, weight=ev.weight, deadline_ms=ev.deadline_ms))

    return CommGraph(slices=slices, edges=edges, events=tuple(events))


def graph_to_doc(graph: CommGraph) -> GraphDoc:
    def _ref(a: int, b: int) -> dict:
        left, right = graph.slices[a], graph.slices[b]
        return {
            "from_app": left.app_id,
            "from_partition": left.partition_id,
            "to_app": right.app_id,
            "to_partition": right.partition_id,
        }

    return GraphDoc(
        slices=[
            SliceDoc(
                app=s.app_id,
                partition=s.partition_id,
                cpu=s.cpu_demand,
                mem_bytes=s.mem_demand,
                group=s.colocation_group,
            )
            for s in graph.slices
        ],
        edges=[EdgeDoc(**_ref(e.src, e.dst), cost_ms=e.cost_ms) for e in graph.edges],
        events=[
            EventDoc(
                id=ev.event_id,
                weight=ev.weight,
                deadline_ms=ev.deadline_ms,
                path=[EdgeRefDoc(**_ref(graph.edges[i].src, graph.edges[i].dst)) for i in ev.edges],
            )
            for ev in graph.events
        ],
    )


def parse_graph(text: str, hop_ms: float | None = None) -> CommGraph:
    try:
        doc = GraphDoc.model_validate_json(text)
    except ValidationError as exc:
        raise ConfigError(f"Invalid graph document [errors={exc.error_count()}]: {exc}") from exc
    return graph_from_doc(doc, hop_ms=hop_ms)


def load_graph(path: str | Path, hop_ms: float | None = None) -> CommGraph:
    source = Path(path)
    try:
        text = source.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"Graph file unreadable [path={source}]") from exc
    graph = parse_graph(text, hop_ms=hop_ms)
    log.debug("Graph loaded [path=%s, slices=%s, edges=%s]", source, len(graph.slices), len(graph.edges))
    return graph


def dump_graph(graph: CommGraph) -> str:
    return graph_to_doc(graph).model_dump_json(indent=2) + "\n"
