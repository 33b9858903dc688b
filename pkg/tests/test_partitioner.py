import unittest

import numpy as np

from app.commgraph.graph_cost import to_partition_graph
from app.errors import ConfigError, StructuralError
from app.partitioner.coarsen import coarsen, contract, match_heavy_edges
from app.partitioner.initial import greedy_partition, search_partition
from app.partitioner.multilevel import partition
from app.partitioner.refine import refine
from app.partitioner.weighted_graph import BalanceSpec, WeightedGraph, parse_edge_list
from app.placement.exact_solver import solve_exact
from app.placement.feasibility import check_feasibility
from app.placement.placement_models import Placement
from tests.support.instances import binding_instance, random_instance


def _star(leaves: int = 4) -> WeightedGraph:
    return WeightedGraph(
        vertex_weights=tuple((0.1, 0.1) for _ in range(leaves + 1)),
        edges=tuple((0, leaf, 1.0) for leaf in range(1, leaves + 1)),
    )


class MatchingTests(unittest.TestCase):
    def test_two_vertices_merge_into_one(self) -> None:
        graph = WeightedGraph(vertex_weights=((0.2, 0.1), (0.3, 0.4)), edges=((0, 1, 2.0),))
        level = contract(graph, match_heavy_edges(graph, np.random.default_rng(0)))

        self.assertEqual(level.graph.n, 1)
        self.assertEqual(level.projection, (0, 0))
        self.assertAlmostEqual(level.graph.vertex_weights[0][0], 0.5)
        self.assertAlmostEqual(level.graph.vertex_weights[0][1], 0.5)
        self.assertEqual(level.graph.edges, ())

    def test_star_center_matches_exactly_one_leaf(self) -> None:
        for seed in range(10):
            mate = match_heavy_edges(_star(), np.random.default_rng(seed))
            matched = [v for v in range(5) if mate[v] != v]
            self.assertEqual(len(matched), 2)
            self.assertIn(0, matched)

    def test_star_coarsens_by_one_vertex_per_level(self) -> None:
        levels = coarsen(_star(), seed=1, min_vertices=1)
        self.assertGreaterEqual(len(levels), 1)
        self.assertEqual(levels[0].graph.n, 4)

    def test_heaviest_edge_wins(self) -> None:
        graph = WeightedGraph(
            vertex_weights=tuple((0.1, 0.1) for _ in range(3)),
            edges=((0, 1, 1.0), (0, 2, 5.0)),
        )
        # with vertex 1 visited first it takes 0, so only check orders starting at 0 or 2
        for seed in range(20):
            rng = np.random.default_rng(seed)
            order = np.random.default_rng(seed).permutation(3).tolist()
            mate = match_heavy_edges(graph, rng)
            if order[0] in (0, 2):
                self.assertEqual(mate[0], 2)

    def test_groups_never_merge_across_labels(self) -> None:
        graph = WeightedGraph(
            vertex_weights=((0.1, 0.1), (0.1, 0.1)),
            edges=((0, 1, 3.0),),
            groups=("compute_intensive", "interactive"),
        )
        self.assertEqual(match_heavy_edges(graph, np.random.default_rng(0)), [0, 1])

    def test_merge_respects_part_capacity(self) -> None:
        graph = WeightedGraph(vertex_weights=((0.6, 0.1), (0.6, 0.1)), edges=((0, 1, 3.0),))
        spec = BalanceSpec(parts=2, capacity=(1.0, 1.0))
        self.assertEqual(match_heavy_edges(graph, np.random.default_rng(0), spec), [0, 1])

    def test_projected_assignments_keep_their_cut(self) -> None:
        rng = np.random.default_rng(17)
        for seed in range(10):
            graph, _ = random_instance(rng, low=8, high=14)
            wg = to_partition_graph(graph)
            levels = coarsen(wg, seed=seed, min_vertices=1)
            if not levels:
                continue

            coarse = [int(p) for p in rng.integers(0, 3, size=levels[-1].graph.n)]
            expected = levels[-1].graph.cut_weight(coarse)
            for level in reversed(levels):
                coarse = [coarse[c] for c in level.projection]
            self.assertAlmostEqual(wg.cut_weight(coarse), expected, places=9)


class RefineTests(unittest.TestCase):
    def test_refinement_never_raises_the_cut_of_a_feasible_start(self) -> None:
        rng = np.random.default_rng(13)
        for k in range(100):
            graph, spec = random_instance(rng) if k % 2 == 0 else binding_instance(rng)
            wg = to_partition_graph(graph)
            balance = BalanceSpec(parts=spec.count, capacity=(spec.cpu_capacity, spec.mem_capacity))
            start = greedy_partition(wg, balance)
            before = check_feasibility(graph, spec, Placement(assignment=tuple(start)))
            if not before.capacity_ok:
                continue
            refined = refine(wg, start, balance)

            self.assertLessEqual(wg.cut_weight(refined), wg.cut_weight(start) + 1e-12)
            after = check_feasibility(graph, spec, Placement(assignment=tuple(refined)))
            self.assertTrue(after.capacity_ok)

    def test_single_move_removes_a_cut_edge(self) -> None:
        graph = WeightedGraph(vertex_weights=((0.1, 0.1),) * 3, edges=((0, 1, 2.0), (1, 2, 1.0)))
        spec = BalanceSpec(parts=2, capacity=(1.0, 1.0))
        refined = refine(graph, [0, 1, 1], spec)
        self.assertEqual(graph.cut_weight(refined), 0.0)

    def test_optimal_triangle_split_is_left_alone(self) -> None:
        # two of three fit in a part, so cutting one vertex off is the best there is
        graph = WeightedGraph(vertex_weights=((0.4, 0.1),) * 3, edges=((0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)))
        refined = refine(graph, [0, 0, 1], BalanceSpec(parts=2, capacity=(1.0, 1.0)))
        self.assertEqual(refined, [0, 0, 1])

    def test_full_parts_exchange_a_pair(self) -> None:
        # both parts are full, so only a swap can pull the heavy edges inside
        graph = WeightedGraph(
            vertex_weights=((0.5, 0.1),) * 4,
            edges=((0, 1, 3.0), (2, 3, 3.0), (0, 2, 1.0), (1, 3, 1.0)),
        )
        refined = refine(graph, [0, 1, 0, 1], BalanceSpec(parts=2, capacity=(1.0, 1.0)))
        self.assertEqual(refined, [1, 1, 0, 0])
        self.assertEqual(graph.cut_weight(refined), 2.0)


class PartitionTests(unittest.TestCase):
    def test_disconnected_cliques_split_without_cut(self) -> None:
        graph = WeightedGraph(
            vertex_weights=((0.3, 0.1),) * 6,
            edges=((0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0)),
        )
        result = partition(graph, BalanceSpec(parts=2, capacity=(1.0, 1.0)), seed=0)
        self.assertTrue(result.feasible)
        self.assertEqual(result.cut_weight, 0.0)
        self.assertEqual(len(set(result.assignment[:3])), 1)
        self.assertEqual(len(set(result.assignment[3:])), 1)

    def test_single_vertex_single_part(self) -> None:
        result = partition(WeightedGraph(vertex_weights=((0.5, 0.5),)), BalanceSpec(parts=1, capacity=(1.0, 1.0)), seed=0)
        self.assertEqual(result.assignment, (0,))
        self.assertEqual(result.cut_weight, 0.0)
        self.assertTrue(result.feasible)

    def test_totals_over_capacity_report_infeasible(self) -> None:
        graph = WeightedGraph(vertex_weights=((0.8, 0.1), (0.8, 0.1), (0.8, 0.1)), edges=((0, 1, 1.0),))
        result = partition(graph, BalanceSpec(parts=2, capacity=(1.0, 1.0)), seed=0)
        self.assertFalse(result.feasible)
        self.assertIn("cpu total", result.message)

    def test_vertex_larger_than_a_part_is_named(self) -> None:
        graph = WeightedGraph(vertex_weights=((1.5, 0.1), (0.1, 0.1)))
        result = partition(graph, BalanceSpec(parts=4, capacity=(1.0, 1.0)), seed=0)
        self.assertFalse(result.feasible)
        self.assertIn("larger than one part", result.message)

    def test_same_seed_same_result(self) -> None:
        rng = np.random.default_rng(21)
        graph, spec = random_instance(rng)
        wg = to_partition_graph(graph)
        balance = BalanceSpec(parts=spec.count, capacity=(1.0, 1.0))
        self.assertEqual(partition(wg, balance, seed=4), partition(wg, balance, seed=4))

    def test_empty_graph_partitions_trivially(self) -> None:
        result = partition(WeightedGraph(vertex_weights=()), BalanceSpec(parts=2, capacity=(1.0, 1.0)), seed=0)
        self.assertTrue(result.feasible)
        self.assertEqual(result.assignment, ())

    def _assert_tracks_exact(self, make_instance, seed: int) -> None:
        rng = np.random.default_rng(seed)
        close = 0
        for _ in range(100):
            graph, spec = make_instance(rng)
            exact = solve_exact(graph, spec)
            wg = to_partition_graph(graph)
            result = partition(wg, BalanceSpec(parts=spec.count, capacity=(spec.cpu_capacity, spec.mem_capacity)), seed=0)

            if exact.feasible:
                self.assertTrue(result.feasible, f"partitioner missed a feasible placement: {result.message}")
                self.assertTrue(check_feasibility(graph, spec, Placement(assignment=result.assignment)).capacity_ok)
                if result.cut_weight <= 1.2 * exact.objective + 1e-9:
                    close += 1
            else:
                close += 1
        self.assertGreaterEqual(close, 90)

    def test_heuristic_tracks_exact_optimum(self) -> None:
        self._assert_tracks_exact(random_instance, 2025)

    def test_heuristic_tracks_exact_optimum_when_capacity_binds(self) -> None:
        self._assert_tracks_exact(binding_instance, 2026)

    def test_heuristic_tracks_exact_optimum_with_isolation_groups(self) -> None:
        self._assert_tracks_exact(lambda rng: binding_instance(rng, with_groups=True), 2027)

    def test_tight_packing_is_found(self) -> None:
        # worst-fit packing strands the last 0.25; a split exists at exactly 1.0 per part
        graph = WeightedGraph(vertex_weights=((0.625, 0.0), (0.5, 0.0), (0.375, 0.0), (0.25, 0.0), (0.25, 0.0)))
        spec = BalanceSpec(parts=2, capacity=(1.0, 1.0))

        self.assertEqual(search_partition(graph, spec), [0, 1, 0, 1, 1])
        self.assertTrue(partition(graph, spec, seed=0).feasible)

    def test_search_prefers_the_lower_cut(self) -> None:
        graph = WeightedGraph(
            vertex_weights=((0.3, 0.1),) * 4,
            edges=((0, 1, 5.0), (1, 2, 1.0), (2, 3, 5.0)),
        )
        found = search_partition(graph, BalanceSpec(parts=2, capacity=(0.6, 1.0)))
        self.assertEqual(graph.cut_weight(found), 1.0)

    def test_search_without_a_fit_returns_nothing(self) -> None:
        graph = WeightedGraph(vertex_weights=((0.6, 0.1),) * 3)
        self.assertIsNone(search_partition(graph, BalanceSpec(parts=2, capacity=(1.0, 1.0))))


class EdgeListTests(unittest.TestCase):
    def test_parses_header_weights_and_edges(self) -> None:
        text = "# tiny\n3 2\n0.1 0.2\n0.3 0.4\n0.5 0.6\n0 1 2.5\n1 2 1.0  # trailing\n"
        graph = parse_edge_list(text)
        self.assertEqual(graph.n, 3)
        self.assertEqual(graph.edges, ((0, 1, 2.5), (1, 2, 1.0)))

    def test_wrong_line_count_is_a_config_error(self) -> None:
        with self.assertRaises(ConfigError):
            parse_edge_list("2 1\n0.1 0.1\n0.1 0.1\n")

    def test_edge_to_unknown_vertex_is_structural(self) -> None:
        with self.assertRaises(StructuralError):
            parse_edge_list("1 1\n0.1 0.1\n0 4 1.0\n")


if __name__ == "__main__":
    unittest.main()
