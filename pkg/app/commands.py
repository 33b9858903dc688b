# app/commands.py
from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, List, Set

from pydantic import BaseModel, ConfigDict

from app.commgraph.commgraph_service import CommGraph
from app.config import RunConfig, dump_config
from app.convergence.convergence_service import SweepPoint, pick_partition_count
from app.errors import ConfigError, InfeasiblePlacementError
from app.partitioner.partitioner_service import BalanceSpec, PartitionResult, partition, read_edge_list
from app.pipeline import (
    GROUP_COMPUTE,
    build_profile,
    build_scenario,
    build_topology,
    prepare,
    resolve_partition_count,
    run_sweep,
)
from app.placement.placement_service import FeasibilityReport, Placement, placement_to_doc
from app.settings import TOOL_VERSION
from app.simengine.demand_profile import DemandProfile
from app.simengine.sim_models import SaturationPoint, SimMetrics
from app.simengine.sim_service import compare_metrics, run, saturation_sweep, saturation_throughput
from app.tooling.report_io import ensure_dir, write_csv, write_json, write_text

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_INTERNAL = 4


class RunManifest(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    config_path: str | None
    seed: int
    subcommand: str
    output_dir: str
    exact_ceiling: int | None = None
    tool_version: str = TOOL_VERSION


class CommandContext(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    config: RunConfig
    config_path: str | None = None
    output_dir: str = "out"
    exact_ceiling: int | None = None
    jobs: int = 1

    def manifest(self, subcommand: str) -> RunManifest:
        return RunManifest(
            config_path=self.config_path,
            seed=self.config.seed,
            subcommand=subcommand,
            output_dir=self.output_dir,
            exact_ceiling=self.exact_ceiling,
        )

    def out(self) -> Path:
        return ensure_dir(self.output_dir)


class SweepReport(BaseModel):
    manifest: RunManifest
    points: List[SweepPoint]
    chosen_partition_count: int


class PlaceReport(BaseModel):
    manifest: RunManifest
    strategy: str
    partition_count: int
    slices: int
    servers: int
    objective_ms: float
    feasibility: FeasibilityReport
    compute_isolated: bool
    partition_cut: float | None
    oracle_objective_ms: float | None
    oracle_gap: float | None
    oracle_note: str


class ProfileReport(BaseModel):
    manifest: RunManifest
    profile: DemandProfile
    total_cpu: float


class SimulateReport(BaseModel):
    manifest: RunManifest
    partition_count: int
    metrics: SimMetrics
    saturation: List[SaturationPoint] = []
    saturation_throughput: float | None = None


class CompareReport(BaseModel):
    manifest: RunManifest
    baseline_config: str | None
    candidate_config: str | None
    baseline: SimMetrics
    candidate: SimMetrics
    deltas: Dict[str, float]


class PartitionReport(BaseModel):
    manifest: RunManifest
    result: PartitionResult


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, InfeasiblePlacementError):
        return EXIT_INFEASIBLE
    return EXIT_INTERNAL


def compute_isolated(graph: CommGraph, profile: DemandProfile, placement: Placement) -> bool:
    compute_apps = {row.app_id for row in profile.rows if row.priority_class == "compute_intensive"}
    compute_servers: Set[int] = set()
    other_servers: Set[int] = set()
    for s, server in zip(graph.slices, placement.assignment):
        compute = s.colocation_group == GROUP_COMPUTE or s.app_id in compute_apps
        (compute_servers if compute else other_servers).add(server)
    return not (compute_servers & other_servers)


# ---------------------------
# sweep-convergence
# ---------------------------
def cmd_sweep_convergence(ctx: CommandContext) -> SweepReport:
    topology = build_topology(ctx.config)
    result = run_sweep(ctx.config, topology, jobs=ctx.jobs)
    chosen = pick_partition_count(result.points)
    out = ctx.out()

    write_csv(
        out / "convergence_raw.csv",
        ["P", "failure_kind", "total_time_s", "compute_time_s", "comm_time_s"],
        (
            [s.partition_count, s.failure.kind, repr(s.total_time), repr(s.compute_time), repr(s.comm_time)]
            for s in result.samples
        ),
    )
    write_csv(
        out / "convergence_summary.csv",
        ["P", "mean", "p95"],
        ([p.partition_count, repr(p.mean), repr(p.p95)] for p in result.points),
    )
    report = SweepReport(manifest=ctx.manifest("sweep-convergence"), points=result.points, chosen_partition_count=chosen)
    write_json(out / "convergence_report.json", report)
    log.info("Convergence sweep written [P*=%s, out=%s]", chosen, out)
    return report


# ---------------------------
# profile
# ---------------------------
def cmd_profile(ctx: CommandContext) -> ProfileReport:
    topology = build_topology(ctx.config)
    partition_count = resolve_partition_count(ctx.config, topology, jobs=ctx.jobs)
    profile = build_profile(ctx.config, topology, partition_count)
    report = ProfileReport(manifest=ctx.manifest("profile"), profile=profile, total_cpu=profile.total_cpu())
    write_json(ctx.out() / "profile.json", report)
    return report


# ---------------------------
# place
# ---------------------------
def cmd_place(ctx: CommandContext) -> PlaceReport:
    profile, graph, spec, outcome = prepare(ctx.config, ceiling=ctx.exact_ceiling, jobs=ctx.jobs)
    out = ctx.out()
    placement = outcome["placement"]
    report = outcome["report"]

    write_json(out / "placement.json", placement_to_doc(graph, placement))
    write_json(out / "feasibility.json", report)
    place_report = PlaceReport(
        manifest=ctx.manifest("place"),
        strategy=ctx.config.placement.strategy,
        partition_count=graph.partition_count,
        slices=len(graph.slices),
        servers=spec.count,
        objective_ms=outcome["objective"],
        feasibility=report,
        compute_isolated=compute_isolated(graph, profile, placement),
        partition_cut=outcome["partition"].cut_weight if outcome["partition"] else None,
        oracle_objective_ms=outcome["oracle_objective"],
        oracle_gap=outcome["oracle_gap"],
        oracle_note=outcome["oracle_note"],
    )
    write_json(out / "place_report.json", place_report)

    if not report.capacity_ok:
        raise InfeasiblePlacementError(report)
    return place_report


# ---------------------------
# simulate / compare
# ---------------------------
def _simulate(ctx: CommandContext, config: RunConfig) -> tuple[SimMetrics, List[SaturationPoint], int, str]:
    profile, graph, spec, outcome = prepare(config, ceiling=ctx.exact_ceiling, jobs=ctx.jobs)
    if not outcome["report"].capacity_ok:
        raise InfeasiblePlacementError(outcome["report"])
    scenario = build_scenario(config, graph, outcome["placement"], spec, profile)
    metrics = run(scenario)
    points: List[SaturationPoint] = []
    if config.simulation.saturation_rates:
        points = saturation_sweep(scenario, config.simulation.saturation_rates, jobs=ctx.jobs)
    return metrics, points, graph.partition_count, scenario.model_dump_json(indent=2) + "\n"


def _latency_rows(metrics: SimMetrics):
    for event_class, values in sorted(metrics.latency_samples.items()):
        for value in values:
            yield [event_class, repr(value)]


def cmd_simulate(ctx: CommandContext) -> SimulateReport:
    metrics, points, partition_count, scenario_json = _simulate(ctx, ctx.config)
    out = ctx.out()
    write_json(out / "metrics.json", metrics)
    write_csv(out / "latency_samples.csv", ["event_class", "latency_ms"], _latency_rows(metrics))
    write_text(out / "scenario.json", scenario_json)
    report = SimulateReport(
        manifest=ctx.manifest("simulate"),
        partition_count=partition_count,
        metrics=metrics,
        saturation=points,
        saturation_throughput=saturation_throughput(points) if points else None,
    )
    write_json(out / "simulate_report.json", report)
    return report


def cmd_compare(ctx: CommandContext, candidate: RunConfig, candidate_path: str | None) -> CompareReport:
    baseline_metrics, _, _, _ = _simulate(ctx, ctx.config)
    candidate_metrics, _, _, _ = _simulate(ctx, candidate)
    out = ctx.out()
    write_json(out / "metrics_baseline.json", baseline_metrics)
    write_json(out / "metrics_candidate.json", candidate_metrics)
    report = CompareReport(
        manifest=ctx.manifest("compare"),
        baseline_config=ctx.config_path,
        candidate_config=candidate_path,
        baseline=baseline_metrics,
        candidate=candidate_metrics,
        deltas=compare_metrics(baseline_metrics, candidate_metrics),
    )
    write_json(out / "compare_report.json", report)
    write_text(out / "compare_config_candidate.json", dump_config(candidate))
    return report


# ---------------------------
# partition (standalone edge-list benchmark)
# ---------------------------
def cmd_partition(ctx: CommandContext, graph_path: str, parts: int, capacity: tuple[float, float], slack: float = 1.0) -> PartitionReport:
    graph = read_edge_list(graph_path)
    try:
        spec = BalanceSpec(parts=parts, capacity=capacity, slack=(slack, slack))
    except ValueError as exc:
        raise ConfigError(f"Invalid balance spec: {exc}") from exc
    result = partition(graph, spec, seed=ctx.config.seed)
    report = PartitionReport(manifest=ctx.manifest("partition"), result=result)
    write_json(ctx.out() / "partition.json", report)
    return report


__all__ = [
    "CommandContext",
    "RunManifest",
    "cmd_sweep_convergence",
    "cmd_profile",
    "cmd_place",
    "cmd_simulate",
    "cmd_compare",
    "cmd_partition",
    "compute_isolated",
    "exit_code_for",
]
