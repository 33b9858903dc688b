# convergence_service.py (facade)
from __future__ import annotations

from app.convergence.convergence_model import (
    ConvergenceModel,
    ConvergenceSample,
    expected_convergence_time,
    measure_convergence,
)
from app.convergence.sweep import SweepPoint, SweepResult, check_sweep_inputs, pick_partition_count, sweep_partitions

__all__ = [
    "ConvergenceModel",
    "ConvergenceSample",
    "SweepPoint",
    "SweepResult",
    "measure_convergence",
    "expected_convergence_time",
    "check_sweep_inputs",
    "sweep_partitions",
    "pick_partition_count",
]
