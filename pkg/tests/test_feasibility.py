import tempfile
import unittest
from pathlib import Path

import numpy as np

from app.commgraph.graph_models import AppSlice, CommGraph
from app.errors import ConfigError, StructuralError
from app.placement.feasibility import check_feasibility
from app.placement.placement_io import dump_placement, load_placement
from app.placement.placement_models import Placement, ServerSpec
from tests.support.instances import random_graph
from tests.support.oracles import recompute_feasibility


def _graph(*cpus: float) -> CommGraph:
    return CommGraph(
        slices=tuple(AppSlice(app_id=f"A{i}", partition_id=0, cpu_demand=c, mem_demand=0.0) for i, c in enumerate(cpus))
    )


class FeasibilityTests(unittest.TestCase):
    def test_cpu_exactly_at_capacity_is_feasible(self) -> None:
        report = check_feasibility(_graph(0.5, 0.5), ServerSpec(count=1, mem_capacity=1.0), Placement(assignment=(0, 0)))
        self.assertTrue(report.cpu_ok)
        self.assertEqual(report.per_server_cpu, [1.0])

    def test_cpu_just_above_capacity_is_infeasible(self) -> None:
        report = check_feasibility(
            _graph(0.5, 0.5 + 1e-9), ServerSpec(count=1, mem_capacity=1.0), Placement(assignment=(0, 0))
        )
        self.assertFalse(report.cpu_ok)
        self.assertFalse(report.capacity_ok)

    def test_length_mismatch_is_structural(self) -> None:
        with self.assertRaises(StructuralError):
            check_feasibility(_graph(0.1, 0.1), ServerSpec(count=2, mem_capacity=1.0), Placement(assignment=(0,)))

    def test_server_out_of_range_is_structural(self) -> None:
        with self.assertRaises(StructuralError):
            check_feasibility(_graph(0.1), ServerSpec(count=2, mem_capacity=1.0), Placement(assignment=(2,)))

    def test_mixed_groups_on_one_server_break_isolation(self) -> None:
        graph = CommGraph(
            slices=(
                AppSlice(app_id="DJ", partition_id=0, cpu_demand=0.1, mem_demand=0.0, colocation_group="compute_intensive"),
                AppSlice(app_id="RL", partition_id=0, cpu_demand=0.1, mem_demand=0.0, colocation_group="interactive"),
                AppSlice(app_id="HB", partition_id=0, cpu_demand=0.1, mem_demand=0.0),
            )
        )
        spec = ServerSpec(count=2, mem_capacity=1.0)
        shared = check_feasibility(graph, spec, Placement(assignment=(0, 0, 1)))
        split = check_feasibility(graph, spec, Placement(assignment=(0, 1, 0)))

        self.assertFalse(shared.isolation_ok)
        self.assertEqual(shared.isolation_conflicts, [0])
        self.assertTrue(split.isolation_ok)

    def test_fuzzed_reports_agree_with_recomputation(self) -> None:
        rng = np.random.default_rng(99)
        for _ in range(1000):
            graph = random_graph(rng, int(rng.integers(1, 9)), with_groups=True, with_deadlines=True)
            spec = ServerSpec(
                count=int(rng.integers(1, 4)),
                cpu_capacity=float(rng.uniform(0.2, 1.0)),
                mem_capacity=float(rng.uniform(0.2, 1.0)),
            )
            assignment = tuple(int(s) for s in rng.integers(0, spec.count, size=len(graph.slices)))
            report = check_feasibility(graph, spec, Placement(assignment=assignment))
            expected = recompute_feasibility(graph, spec, assignment)

            self.assertEqual(report.cpu_ok, expected["cpu_ok"])
            self.assertEqual(report.mem_ok, expected["mem_ok"])
            self.assertEqual(report.isolation_ok, expected["isolation_ok"])
            self.assertEqual(report.deadlines_ok, expected["deadlines_ok"])
            self.assertEqual(report.violated_events, expected["violated_events"])
            self.assertEqual(report.per_server_cpu, expected["per_server_cpu"])
            self.assertEqual(report.per_server_mem, expected["per_server_mem"])


class PlacementFileTests(unittest.TestCase):
    def test_triples_round_trip_through_a_file(self) -> None:
        graph = _graph(0.1, 0.2, 0.3)
        placement = Placement(assignment=(1, 0, 1))
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "placement.json"
            path.write_text(dump_placement(graph, placement), encoding="utf-8")
            self.assertEqual(load_placement(graph, path), placement)

    def test_unassigned_slice_is_structural(self) -> None:
        graph = _graph(0.1, 0.2)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "placement.json"
            path.write_text('{"placement": [{"app": "A0", "partition": 0, "server": 0}]}', encoding="utf-8")
            with self.assertRaises(StructuralError):
                load_placement(graph, path)

    def test_unknown_field_is_a_config_error(self) -> None:
        graph = _graph(0.1)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "placement.json"
            path.write_text('{"placement": [], "note": "x"}', encoding="utf-8")
            with self.assertRaises(ConfigError):
                load_placement(graph, path)


if __name__ == "__main__":
    unittest.main()
