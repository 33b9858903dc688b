# app/topology/fat_tree.py
from __future__ import annotations

import logging
from typing import Dict, Iterable, List, Literal, Sequence, Tuple

import networkx as nx

from app.errors import StructuralError

log = logging.getLogger(__name__)

Layer = Literal["core", "agg", "tor"]
Link = Tuple[int, int]

CORE: Layer = "core"
AGG: Layer = "agg"
TOR: Layer = "tor"


def _link(u: int, v: int) -> Link:
    return (u, v) if u < v else (v, u)


class FatTreeTopology:
    """
    Three-layer switch graph with pod structure and per-link up/down state.

    Switch ids: core switches first, then each pod in turn (its aggregation
    switches, then its ToRs). Edges carry ``up`` (bool) and ``cost`` (1).
    """

    def __init__(
        self,
        graph: nx.Graph,
        pods: int,
        tors_per_pod: int,
        aggs_per_pod: int,
        core_count: int,
    ) -> None:
        self.graph = graph
        self.pods = pods
        self.tors_per_pod = tors_per_pod
        self.aggs_per_pod = aggs_per_pod
        self.core_count = core_count
        self._up_links: List[Link] | None = None

    # ---------- structure ----------

    @property
    def switch_count(self) -> int:
        return self.graph.number_of_nodes()

    @property
    def link_count(self) -> int:
        return self.graph.number_of_edges()

    def layer(self, switch: int) -> Layer:
        return self.graph.nodes[switch]["layer"]

    def pod_of(self, switch: int) -> int | None:
        return self.graph.nodes[switch]["pod"]

    def switches(self, layer: Layer | None = None) -> List[int]:
        if layer is None:
            return sorted(self.graph.nodes)
        return sorted(n for n, data in self.graph.nodes(data=True) if data["layer"] == layer)

    def pod_switches(self, pod: int) -> List[int]:
        return sorted(n for n, data in self.graph.nodes(data=True) if data["pod"] == pod)

    def links(self) -> List[Link]:
        return sorted(_link(u, v) for u, v in self.graph.edges)

    def link_kind(self, u: int, v: int) -> Literal["border", "local"]:
        if not self.graph.has_edge(u, v):
            raise StructuralError(f"Unknown link [link=({u}, {v})]")
        return "border" if CORE in (self.layer(u), self.layer(v)) else "local"

    # ---------- link state ----------

    def is_up(self, u: int, v: int) -> bool:
        if not self.graph.has_edge(u, v):
            raise StructuralError(f"Unknown link [link=({u}, {v})]")
        return bool(self.graph[u][v]["up"])

    def up_links(self) -> List[Link]:
        if self._up_links is None:
            self._up_links = sorted(_link(u, v) for u, v, up in self.graph.edges(data="up") if up)
        return self._up_links

    def fail_link(self, u: int, v: int) -> None:
        if not self.is_up(u, v):
            raise StructuralError(f"Link already down [link=({u}, {v})]")
        self.graph[u][v]["up"] = False
        self._up_links = None

    def restore_link(self, u: int, v: int) -> None:
        self.is_up(u, v)
        self.graph[u][v]["up"] = True
        self._up_links = None

    def up_view(self) -> nx.Graph:
        return nx.subgraph_view(self.graph, filter_edge=lambda u, v: self.graph[u][v]["up"])

    def is_connected(self) -> bool:
        view = self.up_view()
        return view.number_of_nodes() > 0 and nx.is_connected(view)


def build_fat_tree(pods: int, tors_per_pod: int, aggs_per_pod: int, core_count: int) -> FatTreeTopology:
    """Every ToR links to every aggregation switch of its pod; agg j stripes over cores [j*k, (j+1)*k)."""
    for name, value in (
        ("pods", pods),
        ("tors_per_pod", tors_per_pod),
        ("aggs_per_pod", aggs_per_pod),
        ("core_count", core_count),
    ):
        if value <= 0:
            raise StructuralError(f"Fat-tree parameter must be positive [{name}={value}]")
    if core_count % aggs_per_pod != 0:
        raise StructuralError(
            f"Core count must be divisible by aggregation switches per pod [core_count={core_count}, aggs_per_pod={aggs_per_pod}]"
        )

    stripe = core_count // aggs_per_pod
    g = nx.Graph()
    for c in range(core_count):
        g.add_node(c, layer=CORE, pod=None)

    pod_size = aggs_per_pod + tors_per_pod
    for p in range(pods):
        base = core_count + p * pod_size
        aggs = [base + j for j in range(aggs_per_pod)]
        tors = [base + aggs_per_pod + t for t in range(tors_per_pod)]
        for a in aggs:
            g.add_node(a, layer=AGG, pod=p)
        for t in tors:
            g.add_node(t, layer=TOR, pod=p)
        for t in tors:
            for a in aggs:
                g.add_edge(t, a, up=True, cost=1)
        for j, a in enumerate(aggs):
            for c in range(j * stripe, (j + 1) * stripe):
                g.add_edge(a, c, up=True, cost=1)

    topology = FatTreeTopology(g, pods, tors_per_pod, aggs_per_pod, core_count)
    log.debug("Fat-tree built [switches=%s, links=%s]", topology.switch_count, topology.link_count)
    return topology


def build_from_edges(
    edges: Iterable[Sequence[int]],
    core_switches: Iterable[int] = (),
    pod_of: Dict[int, int] | None = None,
) -> FatTreeTopology:
    """Explicit edge-list topology; non-core switches default to pod 0 and count as ToRs."""
    cores = set(core_switches)
    pods_map = pod_of or {}
    g = nx.Graph()
    for edge in edges:
        u, v = int(edge[0]), int(edge[1])
        if u == v:
            raise StructuralError(f"Self-loop link [switch={u}]")
        for n in (u, v):
            if n not in g:
                if n in cores:
                    g.add_node(n, layer=CORE, pod=None)
                else:
                    g.add_node(n, layer=TOR, pod=int(pods_map.get(n, 0)))
        g.add_edge(u, v, up=True, cost=1)
    for c in cores:
        if c not in g:
            g.add_node(c, layer=CORE, pod=None)

    pods = 1 + max((data["pod"] for _, data in g.nodes(data=True) if data["pod"] is not None), default=0)
    return FatTreeTopology(g, pods, tors_per_pod=0, aggs_per_pod=0, core_count=len(cores))
