# app/placement/placement_io.py
from __future__ import annotations

from pathlib import Path
from typing import List

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from app.commgraph.graph_models import CommGraph
from app.errors import ConfigError, StructuralError
from app.placement.placement_models import Placement


class PlacementEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    app: str
    partition: int = Field(ge=0)
    server: int = Field(ge=0)


class PlacementDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: int = 1
    placement: List[PlacementEntry]


def placement_to_doc(graph: CommGraph, placement: Placement) -> PlacementDoc:
    return PlacementDoc(
        placement=[
            PlacementEntry(app=s.app_id, partition=s.partition_id, server=server)
            for s, server in zip(graph.slices, placement.assignment)
        ]
    )


def placement_from_doc(graph: CommGraph, doc: PlacementDoc) -> Placement:
    assignment = [-1] * len(graph.slices)
    for entry in doc.placement:
        idx = graph.index_of(entry.app, entry.partition)
        assignment[idx] = entry.server
    missing = [graph.slices[i].label() for i, server in enumerate(assignment) if server < 0]
    if missing:
        raise StructuralError(f"Placement leaves slices unassigned [slices={','.join(missing)}]")
    return Placement(assignment=tuple(assignment))


def dump_placement(graph: CommGraph, placement: Placement) -> str:
    return placement_to_doc(graph, placement).model_dump_json(indent=2) + "\n"


def load_placement(graph: CommGraph, path: str | Path) -> Placement:
    source = Path(path)
    try:
        doc = PlacementDoc.model_validate_json(source.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"Placement file unreadable [path={source}]") from exc
    except ValidationError as exc:
        raise ConfigError(f"Invalid placement document [path={source}]: {exc}") from exc
    return placement_from_doc(graph, doc)
