# app/pipeline.py
from __future__ import annotations

import logging
from contextlib import contextmanager
from typing import Iterator, List, TypedDict

from app.commgraph.commgraph_service import AppSlice, CommEdge, CommGraph, EventPath, load_graph, to_partition_graph
from app.config import RunConfig
from app.convergence.convergence_service import (
    ConvergenceModel,
    SweepResult,
    check_sweep_inputs,
    expected_convergence_time,
    pick_partition_count,
    sweep_partitions,
)
from app.errors import ConfigError, InstanceTooLargeError, StructuralError
from app.partitioner.partitioner_service import BalanceSpec, PartitionResult, partition
from app.placement.placement_service import (
    FeasibilityReport,
    Placement,
    ServerSpec,
    check_feasibility,
    objective,
    solve_exact,
)
from app.simengine.demand_profile import DemandProfile, ProfileTemplate, profile_demands
from app.simengine.sim_models import SimScenario
from app.topology.topology_service import FatTreeTopology, build_fat_tree, build_from_edges, partition_pods

log = logging.getLogger(__name__)

GROUP_COMPUTE = "compute_intensive"
GROUP_INTERACTIVE = "interactive"
PACKET_IN_EVENT = "packet_in"
HEARTBEAT_EVENT = "heartbeat"


@contextmanager
def config_values(section: str) -> Iterator[None]:
    """Structural failures raised while building from the run config surface as config errors."""
    try:
        yield
    except StructuralError as exc:
        raise ConfigError(f"Invalid {section} config: {exc}") from exc


class PlacementOutcome(TypedDict):
    placement: Placement
    report: FeasibilityReport
    objective: float
    partition: PartitionResult | None
    oracle_objective: float | None
    oracle_gap: float | None
    oracle_note: str


def build_topology(config: RunConfig) -> FatTreeTopology:
    topo = config.topology
    with config_values("topology"):
        if topo.edge_list is not None:
            return build_from_edges(topo.edge_list, core_switches=topo.core_switches)
        return build_fat_tree(topo.pods, topo.tors_per_pod, topo.aggs_per_pod, topo.core_count)


def convergence_model(config: RunConfig) -> ConvergenceModel:
    conv = config.convergence
    return ConvergenceModel(
        compute_coeff=conv.compute_coeff_s,
        advert_latency=conv.advert_latency_s,
        rounds_rule=conv.rounds_rule,
    )


def run_sweep(config: RunConfig, topology: FatTreeTopology, jobs: int = 1) -> SweepResult:
    conv = config.convergence
    with config_values("convergence"):
        check_sweep_inputs(topology, conv.partition_counts, conv.failures_per_count)
    return sweep_partitions(
        topology,
        conv.partition_counts,
        conv.failures_per_count,
        convergence_model(config),
        seed=config.seed,
        jobs=jobs,
    )


def resolve_partition_count(config: RunConfig, topology: FatTreeTopology, jobs: int = 1) -> int:
    """The configured P, or the argmin of the convergence sweep when none is set."""
    if config.placement.partition_count is not None:
        return config.placement.partition_count
    chosen = pick_partition_count(run_sweep(config, topology, jobs=jobs).points)
    log.info("Partition count picked from sweep [P=%s]", chosen)
    return chosen


def activation_ms(config: RunConfig, topology: FatTreeTopology, partition_count: int) -> float:
    with config_values("placement"):
        pods = partition_pods(topology, partition_count)
    seconds = expected_convergence_time(topology, pods, convergence_model(config))
    return seconds * 1000.0


def build_profile(config: RunConfig, topology: FatTreeTopology, partition_count: int) -> DemandProfile:
    return profile_demands(
        ProfileTemplate(
            partition_count=partition_count,
            load=config.placement.load,
            total_switches=topology.switch_count,
            dj_service_ms=activation_ms(config, topology, partition_count),
        )
    )


def build_reference_graph(
    profile: DemandProfile,
    partition_count: int,
    isolate: bool,
    hop_ms: float,
    heartbeat_deadline_ms: float | None = None,
) -> CommGraph:
    """
    P x N slices from the demand profile. Per partition: one FW-RL edge, a
    packet-in event over it and a heart-beat event with an empty path; both
    events weigh 1/P. With ``isolate`` the route-computation slices and the
    rest land in different co-location groups.
    """
    slices: List[AppSlice] = []
    for p in range(partition_count):
        for row in profile.rows:
            group = None
            if isolate:
                group = GROUP_COMPUTE if row.priority_class == "compute_intensive" else GROUP_INTERACTIVE
            slices.append(
                AppSlice(app_id=row.app_id, partition_id=p, cpu_demand=row.cpu, mem_demand=row.mem_bytes, colocation_group=group)
            )
    shell = CommGraph(slices=tuple(slices))

    edges: List[CommEdge] = []
    events: List[EventPath] = []
    weight = 1.0 / partition_count
    has_path = {"FW", "RL"} <= set(profile.app_ids)
    for p in range(partition_count):
        if has_path:
            edges.append(CommEdge(src=shell.index_of("FW", p), dst=shell.index_of("RL", p), cost_ms=hop_ms))
            events.append(EventPath(event_id=f"{PACKET_IN_EVENT}[{p}]", edges=(len(edges) - 1,), weight=weight))
        if "HB" in profile.app_ids:
            events.append(
                EventPath(event_id=f"{HEARTBEAT_EVENT}[{p}]", edges=(), weight=weight, deadline_ms=heartbeat_deadline_ms)
            )
    return CommGraph(slices=tuple(slices), edges=tuple(edges), events=tuple(events))


def server_spec(config: RunConfig) -> ServerSpec:
    place = config.placement
    return ServerSpec(count=place.servers, cpu_capacity=place.cpu_capacity, mem_capacity=place.mem_capacity_bytes)


def topological_placement(graph: CommGraph, spec: ServerSpec) -> Placement:
    """Every slice of partition p on server p."""
    if graph.partition_count > spec.count:
        raise StructuralError(
            f"Topological slicing needs one server per partition [partitions={graph.partition_count}, servers={spec.count}]"
        )
    return Placement(assignment=tuple(s.partition_id for s in graph.slices))


def oracle_gap(
    graph: CommGraph,
    spec: ServerSpec,
    heuristic: float,
    enforce_deadlines: bool,
    ceiling: int | None = None,
) -> tuple[float | None, float | None, str]:
    """(optimal objective, relative gap, note); the note explains a missing oracle."""
    try:
        exact = solve_exact(graph, spec, enforce_deadlines=enforce_deadlines, ceiling=ceiling)
    except InstanceTooLargeError as exc:
        return None, None, str(exc)
    if not exact.feasible or exact.objective is None:
        return None, None, "exact solver found no feasible placement"
    if exact.objective == 0.0:
        return exact.objective, 0.0 if heuristic == 0.0 else float("inf"), ""
    return exact.objective, (heuristic - exact.objective) / exact.objective, ""


def place(
    config: RunConfig,
    graph: CommGraph,
    spec: ServerSpec,
    ceiling: int | None = None,
) -> PlacementOutcome:
    place_cfg = config.placement
    result: PartitionResult | None = None
    if place_cfg.strategy == "topological":
        with config_values("placement"):
            placement = topological_placement(graph, spec)
    else:
        balance = BalanceSpec(
            parts=spec.count,
            capacity=(spec.cpu_capacity, spec.mem_capacity),
            slack=(place_cfg.slack, place_cfg.slack),
        )
        result = partition(to_partition_graph(graph), balance, seed=config.seed)
        placement = Placement(assignment=result.assignment)

    report = check_feasibility(graph, spec, placement)
    value = objective(graph, placement)
    optimum, gap, note = oracle_gap(graph, spec, value, place_cfg.enforce_deadlines, ceiling=ceiling)
    log.info(
        "Placement built [strategy=%s, slices=%s, servers=%s, objective=%.6f, feasible=%s]",
        place_cfg.strategy, len(graph.slices), spec.count, value, report.capacity_ok,
    )
    return {
        "placement": placement,
        "report": report,
        "objective": value,
        "partition": result,
        "oracle_objective": optimum,
        "oracle_gap": gap,
        "oracle_note": note,
    }


def build_graph(config: RunConfig, profile: DemandProfile, partition_count: int) -> CommGraph:
    place_cfg = config.placement
    if place_cfg.graph_path:
        return load_graph(place_cfg.graph_path, hop_ms=place_cfg.hop_ms)
    isolate = place_cfg.isolate and place_cfg.strategy == "optimized"
    return build_reference_graph(
        profile,
        partition_count,
        isolate=isolate,
        hop_ms=place_cfg.hop_ms,
        heartbeat_deadline_ms=config.simulation.heartbeat_deadline_ms,
    )


def build_scenario(
    config: RunConfig,
    graph: CommGraph,
    placement: Placement,
    spec: ServerSpec,
    profile: DemandProfile,
) -> SimScenario:
    sim = config.simulation
    return SimScenario(
        servers=spec,
        graph=graph,
        placement=placement,
        apps=profile.app_models(sim.service_dist),
        packet_in_rate=sim.packet_in_rate,
        packet_in_path=sim.packet_in_path,
        heartbeat_rate=sim.heartbeat_rate,
        heartbeat_deadline_ms=sim.heartbeat_deadline_ms,
        link_failure_interval_s=sim.link_failure_interval_s,
        cross_server_hop_ms=sim.cross_server_hop_ms,
        prioritization=sim.prioritization,
        duration_s=sim.duration_s,
        seed=config.seed,
        simulated_partitions=sim.simulated_partitions,
    )


def prepare(config: RunConfig, ceiling: int | None = None, jobs: int = 1) -> tuple[DemandProfile, CommGraph, ServerSpec, PlacementOutcome]:
    """topology -> P -> profile -> graph -> placement, shared by place, simulate and compare."""
    topology = build_topology(config)
    partition_count = resolve_partition_count(config, topology, jobs=jobs)
    profile = build_profile(config, topology, partition_count)
    graph = build_graph(config, profile, partition_count)
    spec = server_spec(config)
    return profile, graph, spec, place(config, graph, spec, ceiling=ceiling)
