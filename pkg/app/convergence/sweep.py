# app/convergence/sweep.py
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.convergence.convergence_model import ConvergenceModel, ConvergenceSample, measure_convergence
from app.errors import StructuralError
from app.topology.failures import LinkFailureEvent, sample_link_failures
from app.topology.fat_tree import FatTreeTopology
from app.topology.pod_partitioning import partition_pods, valid_partition_counts
from app.tooling.seeding import rng_for

log = logging.getLogger(__name__)

_FAILURE_STREAM = 0


class SweepPoint(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    partition_count: int
    mean: float
    p95: float
    samples: int


class SweepResult(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    points: List[SweepPoint]
    samples: List[ConvergenceSample]


def _measure_batch(
    args: Tuple[FatTreeTopology, int, Sequence[LinkFailureEvent], ConvergenceModel],
) -> List[ConvergenceSample]:
    topology, partition_count, failures, model = args
    partitioning = partition_pods(topology, partition_count)
    sizes = partitioning.partition_sizes(topology)
    return [measure_convergence(topology, partitioning, f, model, sizes=sizes) for f in failures]


def _aggregate(partition_count: int, samples: Sequence[ConvergenceSample]) -> SweepPoint:
    totals = np.array([s.total_time for s in samples], dtype=float)
    return SweepPoint(
        partition_count=partition_count,
        mean=float(totals.mean()),
        p95=float(np.percentile(totals, 95)),
        samples=len(samples),
    )


def check_sweep_inputs(topology: FatTreeTopology, partition_counts: Sequence[int], failures_per_count: int) -> None:
    valid = valid_partition_counts(topology.pods)
    bad = [p for p in partition_counts if p not in valid]
    if bad:
        raise StructuralError(f"Invalid partition counts [invalid={bad}, valid={valid}]")
    if failures_per_count <= 0:
        raise StructuralError(f"failures_per_count must be positive [value={failures_per_count}]")


def sweep_partitions(
    topology: FatTreeTopology,
    partition_counts: Sequence[int],
    failures_per_count: int,
    model: ConvergenceModel,
    seed: int,
    jobs: int = 1,
) -> SweepResult:
    """
    Mean and p95 convergence time per partition count.

    Every P sees the same seeded failure sequence (common random numbers), so
    differences between points come from the model, not from the draw.
    """
    check_sweep_inputs(topology, partition_counts, failures_per_count)

    failures = sample_link_failures(topology, rng_for(seed, _FAILURE_STREAM), failures_per_count)
    batches = [(topology, p, failures, model) for p in partition_counts]

    if jobs > 1 and len(batches) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            measured = list(pool.map(_measure_batch, batches))
    else:
        measured = [_measure_batch(batch) for batch in batches]

    points = [_aggregate(p, samples) for p, samples in zip(partition_counts, measured)]
    for point in points:
        log.info("Convergence point [P=%s, mean=%.4f, p95=%.4f]", point.partition_count, point.mean, point.p95)
    return SweepResult(points=points, samples=[s for batch in measured for s in batch])


def pick_partition_count(points: Sequence[SweepPoint]) -> int:
    """argmin of mean convergence time; ties go to the smaller P."""
    if not points:
        raise StructuralError("Cannot pick a partition count from an empty sweep")
    best = min(points, key=lambda p: (p.mean, p.partition_count))
    return best.partition_count
