import unittest

import numpy as np

from app.commgraph.graph_cost import edge_coefficients, event_cost, to_partition_graph, weighted_latency
from app.commgraph.graph_models import AppSlice, CommEdge, CommGraph, EventPath
from app.errors import StructuralError
from app.placement.placement_models import Placement
from tests.support.instances import chain_graph, random_graph
from tests.support.oracles import all_assignments, rewalk_event, rewalk_objective


def _slice(app: str, partition: int = 0, cpu: float = 0.1) -> AppSlice:
    return AppSlice(app_id=app, partition_id=partition, cpu_demand=cpu, mem_demand=0.0)


class CommGraphStructureTests(unittest.TestCase):
    def test_duplicate_slice_is_rejected(self) -> None:
        with self.assertRaises(StructuralError):
            CommGraph(slices=(_slice("FW"), _slice("FW")))

    def test_self_loop_is_rejected(self) -> None:
        with self.assertRaises(StructuralError):
            CommGraph(slices=(_slice("FW"), _slice("RL")), edges=(CommEdge(src=1, dst=1, cost_ms=1.0),))

    def test_edge_to_unknown_slice_is_rejected(self) -> None:
        with self.assertRaises(StructuralError):
            CommGraph(slices=(_slice("FW"),), edges=(CommEdge(src=0, dst=3, cost_ms=1.0),))

    def test_reverse_duplicate_edge_is_rejected(self) -> None:
        with self.assertRaises(StructuralError):
            CommGraph(
                slices=(_slice("FW"), _slice("RL")),
                edges=(CommEdge(src=0, dst=1, cost_ms=1.0), CommEdge(src=1, dst=0, cost_ms=2.0)),
            )

    def test_event_with_unknown_edge_is_rejected(self) -> None:
        with self.assertRaises(StructuralError):
            CommGraph(slices=(_slice("FW"),), events=(EventPath(event_id="x", edges=(0,)),))

    def test_lookup_helpers(self) -> None:
        graph = CommGraph(
            slices=(_slice("FW", 0), _slice("RL", 0), _slice("FW", 1), _slice("RL", 1)),
            edges=(CommEdge(src=0, dst=1, cost_ms=0.5),),
        )
        self.assertEqual(graph.index_of("RL", 1), 3)
        self.assertEqual(graph.find_edge(1, 0), 0)
        self.assertEqual(graph.partition_count, 2)
        self.assertTrue(graph.is_complete)
        with self.assertRaises(StructuralError):
            graph.index_of("DJ", 0)
        with self.assertRaises(StructuralError):
            graph.find_edge(2, 3)


class CostTests(unittest.TestCase):
    def test_two_slice_split_costs_the_edge(self) -> None:
        graph = chain_graph([1.0])
        self.assertEqual(weighted_latency(graph, Placement(assignment=(0, 1))), 1.0)
        self.assertEqual(weighted_latency(graph, Placement(assignment=(0, 0))), 0.0)

    def test_all_on_one_server_costs_nothing(self) -> None:
        graph = chain_graph([0.4, 1.1, 2.5])
        self.assertEqual(weighted_latency(graph, Placement(assignment=(0, 0, 0, 0))), 0.0)

    def test_repeated_edge_counts_once_per_traversal(self) -> None:
        graph = CommGraph(
            slices=(_slice("FW"), _slice("RL")),
            edges=(CommEdge(src=0, dst=1, cost_ms=0.5),),
            events=(EventPath(event_id="round_trip", edges=(0, 0), weight=2.0),),
        )
        placement = Placement(assignment=(0, 1))
        self.assertEqual(event_cost(graph, placement, graph.events[0]), 1.0)
        self.assertEqual(weighted_latency(graph, placement), 2.0)
        self.assertEqual(edge_coefficients(graph), {0: 4.0})

    def test_empty_event_path_costs_nothing(self) -> None:
        graph = CommGraph(slices=(_slice("HB"),), events=(EventPath(event_id="hb", deadline_ms=100.0),))
        self.assertEqual(weighted_latency(graph, Placement(assignment=(0,))), 0.0)

    def test_unplaced_slice_is_a_structural_error(self) -> None:
        graph = chain_graph([1.0])
        with self.assertRaises(StructuralError):
            event_cost(graph, Placement(assignment=(0,)), graph.events[0])

    def test_exhaustive_placements_match_independent_rewalk(self) -> None:
        rng = np.random.default_rng(2024)
        for _ in range(20):
            graph = random_graph(rng, int(rng.integers(2, 7)))
            for assignment in all_assignments(len(graph.slices), 3):
                placement = Placement(assignment=assignment)
                for k, event in enumerate(graph.events):
                    self.assertEqual(event_cost(graph, placement, event), rewalk_event(graph, assignment, k))
                self.assertEqual(weighted_latency(graph, placement), rewalk_objective(graph, assignment))

    def test_cut_of_partition_graph_equals_weighted_latency(self) -> None:
        rng = np.random.default_rng(7)
        for _ in range(20):
            graph = random_graph(rng, int(rng.integers(2, 9)))
            wg = to_partition_graph(graph)
            for _ in range(30):
                assignment = tuple(int(s) for s in rng.integers(0, 3, size=len(graph.slices)))
                self.assertAlmostEqual(
                    wg.cut_weight(assignment),
                    weighted_latency(graph, Placement(assignment=assignment)),
                    places=9,
                )

    def test_partition_graph_carries_demands_and_groups(self) -> None:
        graph = CommGraph(
            slices=(
                AppSlice(app_id="DJ", partition_id=0, cpu_demand=0.25, mem_demand=4.0, colocation_group="compute_intensive"),
                AppSlice(app_id="RL", partition_id=0, cpu_demand=0.45, mem_demand=2.0, colocation_group="interactive"),
            ),
            edges=(CommEdge(src=0, dst=1, cost_ms=0.5),),
        )
        wg = to_partition_graph(graph)
        self.assertEqual(wg.vertex_weights, ((0.25, 4.0), (0.45, 2.0)))
        self.assertEqual(wg.groups, ("compute_intensive", "interactive"))
        # no event walks the edge, so it carries no weight
        self.assertEqual(wg.edges, ())

    def test_relabelling_servers_keeps_the_cost(self) -> None:
        rng = np.random.default_rng(19)
        for _ in range(20):
            graph = random_graph(rng, int(rng.integers(2, 9)))
            for _ in range(10):
                assignment = tuple(int(s) for s in rng.integers(0, 4, size=len(graph.slices)))
                relabel = [int(s) for s in rng.permutation(4)]
                moved = tuple(relabel[s] for s in assignment)
                self.assertAlmostEqual(
                    weighted_latency(graph, Placement(assignment=moved)),
                    weighted_latency(graph, Placement(assignment=assignment)),
                    places=9,
                )

    def test_merging_two_servers_never_raises_the_cost(self) -> None:
        rng = np.random.default_rng(23)
        for _ in range(20):
            graph = random_graph(rng, int(rng.integers(2, 9)))
            for _ in range(10):
                assignment = tuple(int(s) for s in rng.integers(0, 3, size=len(graph.slices)))
                keep, gone = (int(s) for s in rng.choice(3, size=2, replace=False))
                merged = tuple(keep if s == gone else s for s in assignment)
                self.assertLessEqual(
                    weighted_latency(graph, Placement(assignment=merged)),
                    weighted_latency(graph, Placement(assignment=assignment)) + 1e-12,
                )


if __name__ == "__main__":
    unittest.main()
