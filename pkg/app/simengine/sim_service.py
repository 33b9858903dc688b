# app/simengine/sim_service.py
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Sequence

import numpy as np

from app.errors import InfeasiblePlacementError, StructuralError
from app.placement.feasibility import check_feasibility
from app.simengine.event_loop import EventLoop
from app.simengine.sim_models import (
    LatencySummary,
    SaturationPoint,
    SimMetrics,
    SimScenario,
    StationStats,
)

log = logging.getLogger(__name__)


def _summarise(samples: List[float]) -> LatencySummary:
    if not samples:
        return LatencySummary(count=0, p50=0.0, p95=0.0, p99=0.0, mean=0.0)
    values = np.asarray(samples, dtype=float)
    p50, p95, p99 = np.percentile(values, [50, 95, 99])
    return LatencySummary(count=len(samples), p50=float(p50), p95=float(p95), p99=float(p99), mean=float(values.mean()))


def _metrics(loop: EventLoop) -> SimMetrics:
    scenario = loop.scenario
    rec = loop.recorder
    window_ms = loop.duration_ms - loop.window_start
    window_s = window_ms / 1000.0

    stations = []
    for station in loop.stations:
        c = station.counters
        stations.append(
            StationStats(
                server=station.server,
                arrivals=c.arrivals,
                arrival_rate=c.arrivals / window_ms,
                mean_sojourn_ms=c.sojourn_total / c.departures if c.departures else 0.0,
                mean_in_system=c.area / window_ms,
                utilization=min(1.0, c.busy / window_ms),
            )
        )

    return SimMetrics(
        throughput=rec.completed_packet_ins / window_s,
        offered_rate=rec.generated_packet_ins / window_s,
        nominal_rate=scenario.packet_in_rate * len(scenario.simulated_partitions),
        generated_packet_ins=rec.generated_packet_ins,
        completed_packet_ins=rec.completed_packet_ins,
        latency_quantiles={name: _summarise(values) for name, values in sorted(rec.latencies.items())},
        heartbeats=rec.heartbeats,
        missed_deadlines=rec.missed,
        missed_fraction=rec.missed / rec.heartbeats if rec.heartbeats else 0.0,
        cpu_utilization=[s.utilization for s in stations],
        stations=stations,
        priority_inversions=sum(s.counters.inversions for s in loop.stations),
        latency_samples={name: list(values) for name, values in sorted(rec.latencies.items())},
    )


def run(scenario: SimScenario) -> SimMetrics:
    """Simulates one scenario; refuses placements that break capacity or isolation."""
    report = check_feasibility(scenario.graph, scenario.servers, scenario.placement)
    if not report.capacity_ok:
        log.error(
            "Simulation refused [cpu_ok=%s, mem_ok=%s, isolation_ok=%s]",
            report.cpu_ok, report.mem_ok, report.isolation_ok,
        )
        raise InfeasiblePlacementError(report)

    loop = EventLoop(scenario)
    loop.run()
    metrics = _metrics(loop)
    log.info(
        "Simulation done [rate=%.1f, throughput=%.1f, hb_missed=%s/%s, prioritized=%s]",
        metrics.nominal_rate, metrics.throughput, metrics.missed_deadlines, metrics.heartbeats, scenario.prioritization,
    )
    return metrics


def _run_at_rate(args: tuple[SimScenario, float]) -> SaturationPoint:
    base, rate = args
    metrics = run(base.model_copy(update={"packet_in_rate": rate}))
    return SaturationPoint(
        rate=rate * len(base.simulated_partitions),
        offered_rate=metrics.offered_rate,
        throughput=metrics.throughput,
        completion_ratio=metrics.completion_ratio,
    )


def saturation_sweep(base: SimScenario, rates: Sequence[float], jobs: int = 1) -> List[SaturationPoint]:
    """One run per rate; every run reuses the base seed, so arrival streams are shared across rates."""
    if not rates or any(r <= 0 for r in rates) or list(rates) != sorted(rates):
        raise StructuralError(f"Saturation rates must be positive and ascending [rates={list(rates)}]")

    tasks = [(base, float(r)) for r in rates]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_at_rate, tasks))
    return [_run_at_rate(t) for t in tasks]


def saturation_throughput(points: Sequence[SaturationPoint], tolerance: float = 0.02) -> float:
    """
    Throughput at the knee: the last point of the ascending sweep whose
    completed/generated ratio stays within ``tolerance`` (all earlier points too).
    """
    best = 0.0
    for point in points:
        if point.completion_ratio < 1.0 - tolerance:
            break
        best = max(best, point.throughput)
    return best


def compare_metrics(a: SimMetrics, b: SimMetrics) -> Dict[str, float]:
    """b minus a for the headline numbers."""
    return {
        "throughput": b.throughput - a.throughput,
        "hb_p95_ms": b.p95("heartbeat") - a.p95("heartbeat"),
        "hb_p99_ms": _p99(b) - _p99(a),
        "hb_missed_fraction": b.missed_fraction - a.missed_fraction,
        "packet_in_p95_ms": b.p95("packet_in") - a.p95("packet_in"),
    }


def _p99(metrics: SimMetrics) -> float:
    summary = metrics.latency_quantiles.get("heartbeat")
    return summary.p99 if summary else 0.0
