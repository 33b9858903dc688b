# app/topology/failures.py
from __future__ import annotations

from typing import List, Literal, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.errors import StructuralError
from app.topology.fat_tree import FatTreeTopology

FailureKind = Literal["border", "local"]


class LinkFailureEvent(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    link: Tuple[int, int]
    kind: FailureKind
    time: float = Field(default=0.0, ge=0.0)


def sample_link_failure(topology: FatTreeTopology, rng: np.random.Generator, time: float = 0.0) -> LinkFailureEvent:
    """Uniform over currently-up links; the link itself is left up."""
    up = topology.up_links()
    if not up:
        raise StructuralError("No up link left to fail")
    u, v = up[int(rng.integers(len(up)))]
    return LinkFailureEvent(link=(u, v), kind=topology.link_kind(u, v), time=time)


def sample_link_failures(
    topology: FatTreeTopology,
    rng: np.random.Generator,
    count: int,
    interval_s: float = 0.0,
) -> List[LinkFailureEvent]:
    """Independent draws against the same link state (each failure is repaired before the next)."""
    return [sample_link_failure(topology, rng, time=i * interval_s) for i in range(count)]


def border_link_fraction(topology: FatTreeTopology) -> float:
    links = topology.links()
    if not links:
        return 0.0
    border = sum(1 for u, v in links if topology.link_kind(u, v) == "border")
    return border / len(links)
