# app/partitioner/multilevel.py
from __future__ import annotations

import logging
from typing import List

import numpy as np

from app.partitioner.coarsen import coarsen
from app.partitioner.initial import greedy_partition, grow_partition, search_partition
from app.partitioner.refine import refine
from app.partitioner.weighted_graph import BalanceSpec, PartitionResult, WeightedGraph, evaluate
from app.settings import settings
from app.tooling.seeding import rng_for

log = logging.getLogger(__name__)

_CONSTRAINTS = ("cpu", "mem")

# recursion depth of the bounded search
SEARCH_MAX_VERTICES = 256
EXTRA_TRIAL_FACTOR = 3


def _totals_message(graph: WeightedGraph, spec: BalanceSpec) -> str | None:
    totals = graph.totals()
    limits = spec.limits
    problems = [
        f"{name} total {total:.6g} exceeds {spec.parts} x {limit:.6g}"
        for name, total, limit in zip(_CONSTRAINTS, totals, limits)
        if total > spec.parts * limit
    ]
    heavy = [
        v for v, (cpu, mem) in enumerate(graph.vertex_weights)
        if cpu > limits[0] or mem > limits[1]
    ]
    if heavy:
        problems.append(f"vertices larger than one part: {heavy[:8]}")
    return "; ".join(problems) or None


def _initial(
    coarsest: WeightedGraph,
    spec: BalanceSpec,
    rng: np.random.Generator,
    trial: int,
    searched: int,
) -> List[int]:
    if trial == 0:
        return greedy_partition(coarsest, spec)
    if trial == searched and coarsest.n <= SEARCH_MAX_VERTICES:
        found = search_partition(coarsest, spec)
        if found is not None:
            return found
    return grow_partition(coarsest, spec, rng, fill=trial % 2 == 0)


def _run_trial(graph: WeightedGraph, spec: BalanceSpec, seed: int, trial: int, searched: int) -> List[int]:
    rng = rng_for(seed, trial)
    levels = coarsen(graph, rng, spec=spec)
    coarsest = levels[-1].graph if levels else graph

    assignment = refine(coarsest, _initial(coarsest, spec, rng, trial, searched), spec)

    # Project back level by level; merged vertices inherit their coarse part.
    for depth in range(len(levels) - 1, -1, -1):
        finer = levels[depth - 1].graph if depth > 0 else graph
        projection = levels[depth].projection
        assignment = [assignment[projection[v]] for v in range(finer.n)]
        assignment = refine(finer, assignment, spec)
    return assignment


def partition(
    graph: WeightedGraph,
    spec: BalanceSpec,
    seed: int,
    trials: int | None = None,
) -> PartitionResult:
    """
    Multilevel S-way partition minimising edge cut under hard per-part capacities.

    Runs several seeded trials (coarsen, initial partition, project and refine)
    and keeps the best: feasible first, then lowest cut, then earliest trial.
    Trial 0 starts from the greedy packing, the one after the seeded trials
    from the bounded search, the rest from graph growing. While no trial fits,
    extra growing trials follow, up to EXTRA_TRIAL_FACTOR times the count.
    A zero cut ends the run early. Never raises on infeasibility; the result
    carries feasible=False and a message.
    """
    if graph.n == 0:
        return evaluate(graph, [], spec)

    message = _totals_message(graph, spec)
    count = max(1, settings.partition_trials if trials is None else trials)
    if message is not None:
        log.warning("Partition infeasible up front [parts=%s, reason=%s]", spec.parts, message)

    planned = 1 if message is not None else count + 1
    ceiling = 1 if message is not None else planned + EXTRA_TRIAL_FACTOR * count

    best: PartitionResult | None = None
    trial = 0
    while trial < ceiling:
        result = evaluate(graph, _run_trial(graph, spec, seed, trial, searched=count), spec, message=message, trial=trial)
        if best is None or (not best.feasible, best.cut_weight) > (not result.feasible, result.cut_weight):
            best = result
        trial += 1
        if best.feasible and (best.cut_weight <= 0.0 or trial >= planned):
            break

    assert best is not None
    if not best.feasible and best.message is None:
        best = best.model_copy(update={"message": "no trial found an assignment within capacity"})
    log.info(
        "Partition done [vertices=%s, parts=%s, cut=%.6g, feasible=%s, trial=%s]",
        graph.n, spec.parts, best.cut_weight, best.feasible, best.trial,
    )
    return best
