# placement_service.py (facade)
from __future__ import annotations

from app.placement.exact_solver import solve_exact
from app.placement.feasibility import check_feasibility, objective
from app.placement.placement_io import dump_placement, load_placement, placement_to_doc
from app.placement.placement_models import ExactSolution, FeasibilityReport, Placement, ServerSpec

__all__ = [
    "ServerSpec",
    "Placement",
    "FeasibilityReport",
    "ExactSolution",
    "check_feasibility",
    "objective",
    "solve_exact",
    "dump_placement",
    "load_placement",
    "placement_to_doc",
]
