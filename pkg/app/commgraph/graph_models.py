# app/commgraph/graph_models.py
from __future__ import annotations

from functools import cached_property
from typing import Dict, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.errors import StructuralError

SliceKey = Tuple[str, int]


class AppSlice(BaseModel):
    """One application instance scoped to one topological partition."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    app_id: str
    partition_id: int = Field(ge=0)
    cpu_demand: float = Field(ge=0.0)
    mem_demand: float = Field(ge=0.0)
    colocation_group: str | None = None

    @property
    def key(self) -> SliceKey:
        return (self.app_id, self.partition_id)

    def label(self) -> str:
        return f"{self.app_id}[{self.partition_id}]"


class CommEdge(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    src: int = Field(ge=0)
    dst: int = Field(ge=0)
    cost_ms: float = Field(ge=0.0)

    @property
    def pair(self) -> Tuple[int, int]:
        return (self.src, self.dst) if self.src < self.dst else (self.dst, self.src)


class EventPath(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    event_id: str
    edges: Tuple[int, ...] = ()
    weight: float = Field(default=1.0, ge=0.0)
    deadline_ms: float | None = Field(default=None, gt=0.0)


class CommGraph(BaseModel):
    """Slices, symmetric communication costs and weighted latency-sensitive event paths."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    slices: Tuple[AppSlice, ...] = ()
    edges: Tuple[CommEdge, ...] = ()
    events: Tuple[EventPath, ...] = ()

    @model_validator(mode="after")
    def _check_structure(self) -> "CommGraph":
        seen: set[SliceKey] = set()
        for item in self.slices:
            if item.key in seen:
                raise StructuralError(f"Duplicate slice [slice={item.label()}]")
            seen.add(item.key)

        pairs: set[Tuple[int, int]] = set()
        n = len(self.slices)
        for edge in self.edges:
            if edge.src == edge.dst:
                raise StructuralError(f"Self-loop edge [slice={edge.src}]")
            if edge.src >= n or edge.dst >= n:
                missing = edge.src if edge.src >= n else edge.dst
                raise StructuralError(f"Edge references unknown slice [slice={missing}]")
            if edge.pair in pairs:
                raise StructuralError(f"Duplicate edge [pair={edge.pair}]")
            pairs.add(edge.pair)

        for event in self.events:
            for idx in event.edges:
                if idx < 0 or idx >= len(self.edges):
                    raise StructuralError(f"Event references unknown edge [event={event.event_id}, edge={idx}]")
        return self

    @cached_property
    def slice_index(self) -> Dict[SliceKey, int]:
        return {item.key: i for i, item in enumerate(self.slices)}

    @cached_property
    def edge_index(self) -> Dict[Tuple[int, int], int]:
        return {edge.pair: i for i, edge in enumerate(self.edges)}

    @property
    def partition_count(self) -> int:
        return len({item.partition_id for item in self.slices})

    @property
    def app_count(self) -> int:
        return len({item.app_id for item in self.slices})

    @property
    def is_complete(self) -> bool:
        return len(self.slices) == self.partition_count * self.app_count

    def index_of(self, app_id: str, partition_id: int) -> int:
        try:
            return self.slice_index[(app_id, partition_id)]
        except KeyError:
            raise StructuralError(f"Unknown slice [slice={app_id}[{partition_id}]]") from None

    def find_edge(self, a: int, b: int) -> int:
        pair = (a, b) if a < b else (b, a)
        try:
            return self.edge_index[pair]
        except KeyError:
            raise StructuralError(
                f"No edge between slices [from={self.slices[a].label()}, to={self.slices[b].label()}]"
            ) from None
