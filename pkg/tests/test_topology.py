import math
import unittest

import numpy as np

from app.errors import StructuralError
from app.topology.topology_service import (
    border_link_fraction,
    build_fat_tree,
    build_from_edges,
    partition_pods,
    sample_link_failure,
    sample_link_failures,
    shortest_paths,
    valid_partition_counts,
)


class FatTreeTests(unittest.TestCase):
    @classmethod
    def setUpClass(cls) -> None:
        cls.reference = build_fat_tree(32, 32, 32, 512)

    def test_reference_sizes(self) -> None:
        self.assertEqual(self.reference.switch_count, 2560)
        self.assertEqual(self.reference.link_count, 49152)
        self.assertAlmostEqual(border_link_fraction(self.reference), 1.0 / 3.0)

    def test_reference_wiring(self) -> None:
        topo = self.reference
        self.assertEqual(len(topo.switches("core")), 512)
        self.assertEqual(len(topo.pod_switches(5)), 64)
        first_agg = 512
        self.assertEqual(topo.layer(first_agg), "agg")
        self.assertEqual(sorted(n for n in topo.graph.neighbors(first_agg) if topo.layer(n) == "core"), list(range(16)))

    def test_minimal_instance(self) -> None:
        topo = build_fat_tree(2, 1, 1, 1)
        self.assertEqual(topo.switch_count, 5)
        self.assertEqual(topo.link_count, 4)
        self.assertEqual(topo.link_kind(0, 1), "border")
        self.assertEqual(topo.link_kind(1, 2), "local")

    def test_invalid_parameters(self) -> None:
        with self.assertRaises(StructuralError):
            build_fat_tree(2, 2, 2, 5)
        with self.assertRaises(StructuralError):
            build_fat_tree(0, 2, 2, 4)

    def test_link_state_changes(self) -> None:
        topo = build_fat_tree(2, 1, 1, 1)
        topo.fail_link(0, 1)
        self.assertFalse(topo.is_up(1, 0))
        self.assertFalse(topo.is_connected())
        self.assertNotIn((0, 1), topo.up_links())
        with self.assertRaises(StructuralError):
            topo.fail_link(0, 1)
        topo.restore_link(0, 1)
        self.assertTrue(topo.is_connected())

    def test_unknown_link_is_structural(self) -> None:
        topo = build_fat_tree(2, 1, 1, 1)
        with self.assertRaises(StructuralError):
            topo.is_up(2, 4)

    def test_explicit_edge_list(self) -> None:
        topo = build_from_edges([(0, 1), (1, 2)], core_switches=[0], pod_of={1: 0, 2: 1})
        self.assertEqual(topo.pods, 2)
        self.assertEqual(topo.link_kind(0, 1), "border")
        with self.assertRaises(StructuralError):
            build_from_edges([(3, 3)])


class ShortestPathTests(unittest.TestCase):
    def test_cross_pod_distance_and_parent(self) -> None:
        topo = build_fat_tree(2, 1, 1, 1)
        paths = shortest_paths(topo, [2])
        self.assertEqual(paths.dist(2, 4), 4.0)
        self.assertEqual(paths.parent[2][4], 3)
        self.assertIsNone(paths.parent[2][2])

    def test_equal_cost_parent_is_lowest_id(self) -> None:
        topo = build_fat_tree(2, 2, 2, 2)
        paths = shortest_paths(topo, [4])
        self.assertEqual(paths.dist(4, 5), 2.0)
        self.assertEqual(paths.parent[4][5], 2)

    def test_failed_link_makes_switches_unreachable(self) -> None:
        topo = build_fat_tree(2, 1, 1, 1)
        topo.fail_link(0, 3)
        paths = shortest_paths(topo, [2])
        self.assertTrue(math.isinf(paths.dist(2, 4)))
        self.assertIsNone(paths.parent[2][4])

    def test_distances_are_symmetric(self) -> None:
        topo = build_fat_tree(4, 2, 2, 4)
        nodes = topo.switches()
        paths = shortest_paths(topo, nodes)
        for a in nodes:
            for b in nodes:
                self.assertEqual(paths.dist(a, b), paths.dist(b, a))

    def test_failures_never_shorten_a_path(self) -> None:
        topo = build_fat_tree(4, 2, 2, 4)
        nodes = topo.switches()
        rng = np.random.default_rng(3)
        before = shortest_paths(topo, nodes)
        for _ in range(8):
            event = sample_link_failure(topo, rng)
            topo.fail_link(*event.link)
            after = shortest_paths(topo, nodes)
            for a in nodes:
                for b in nodes:
                    self.assertGreaterEqual(after.dist(a, b), before.dist(a, b))
            before = after


class PodPartitioningTests(unittest.TestCase):
    def test_valid_counts_are_divisors(self) -> None:
        self.assertEqual(valid_partition_counts(32), [1, 2, 4, 8, 16, 32])

    def test_reference_partitions_are_even(self) -> None:
        topo = build_fat_tree(32, 32, 32, 512)
        for parts, size in ((1, 2560), (8, 320), (32, 80)):
            self.assertEqual(partition_pods(topo, parts).partition_sizes(topo), [size] * parts)

    def test_non_divisor_is_rejected_with_valid_list(self) -> None:
        topo = build_fat_tree(4, 1, 1, 1)
        with self.assertRaises(StructuralError) as ctx:
            partition_pods(topo, 3)
        self.assertIn("[1, 2, 4]", str(ctx.exception))


class FailureSamplingTests(unittest.TestCase):
    def test_same_seed_same_failures(self) -> None:
        topo = build_fat_tree(4, 2, 2, 4)
        first = sample_link_failures(topo, np.random.default_rng(8), 20, interval_s=10.0)
        second = sample_link_failures(topo, np.random.default_rng(8), 20, interval_s=10.0)
        self.assertEqual(first, second)
        self.assertEqual(first[3].time, 30.0)

    def test_kind_follows_the_link(self) -> None:
        topo = build_fat_tree(4, 2, 2, 4)
        rng = np.random.default_rng(1)
        for _ in range(50):
            event = sample_link_failure(topo, rng)
            self.assertEqual(event.kind, topo.link_kind(*event.link))
            self.assertTrue(topo.is_up(*event.link))

    def test_reference_border_share_matches_link_mix(self) -> None:
        topo = build_fat_tree(32, 32, 32, 512)
        rng = np.random.default_rng(5)
        n = 10_000
        border = sum(1 for _ in range(n) if sample_link_failure(topo, rng).kind == "border")

        p = border_link_fraction(topo)
        sigma = math.sqrt(n * p * (1 - p))
        self.assertLessEqual(abs(border - n * p), 3 * sigma)

    def test_no_up_link_is_structural(self) -> None:
        topo = build_fat_tree(2, 1, 1, 1)
        for u, v in topo.links():
            topo.fail_link(u, v)
        with self.assertRaises(StructuralError):
            sample_link_failure(topo, np.random.default_rng(0))


if __name__ == "__main__":
    unittest.main()
