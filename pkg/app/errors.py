from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from app.placement.placement_models import FeasibilityReport

INFEASIBLE_PLACEMENT_MESSAGE = "Placement violates server capacity or isolation constraints."
INSTANCE_TOO_LARGE_MESSAGE = "Instance exceeds the exact-solve ceiling."


class PlacementError(RuntimeError):
    """Base class for every error raised by the planner."""


class StructuralError(PlacementError):
    """Raised when inputs reference missing objects or violate structural rules."""


class ConfigError(PlacementError):
    """Raised when a config, graph or placement document cannot be accepted."""


class InstanceTooLargeError(PlacementError):
    """Raised when the exact solver is asked to enumerate an oversized instance."""

    def __init__(self, slices: int, ceiling: int) -> None:
        super().__init__(f"{INSTANCE_TOO_LARGE_MESSAGE} [slices={slices}, ceiling={ceiling}]")
        self.slices = slices
        self.ceiling = ceiling


class InfeasiblePlacementError(PlacementError):
    """Raised when a simulation is requested for a placement that does not fit its servers."""

    def __init__(self, report: "FeasibilityReport", message: str | None = None) -> None:
        super().__init__(message or INFEASIBLE_PLACEMENT_MESSAGE)
        self.report = report
