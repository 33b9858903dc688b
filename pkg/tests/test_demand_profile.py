import unittest

from app.config import RunConfig
from app.simengine.demand_profile import (
    FW_SERVICE_MS,
    GIB,
    IDLE_CPU,
    RL_SERVICE_MS,
    ProfileTemplate,
    dj_cpu,
    profile_demands,
)


class DemandProfileTests(unittest.TestCase):
    def test_reference_table_sums_close_to_one_core(self) -> None:
        profile = profile_demands(ProfileTemplate(partition_count=4))
        self.assertAlmostEqual(profile.total_cpu(), 0.95, places=9)
        self.assertAlmostEqual(profile.row("DJ").cpu, 0.25, places=12)
        self.assertEqual(profile.app_ids, ["DJ", "RL", "FW", "HB"])

    def test_memory_table(self) -> None:
        one = profile_demands(ProfileTemplate(partition_count=1))
        eight = profile_demands(ProfileTemplate(partition_count=8))
        self.assertEqual(one.row("DJ").mem_bytes, 6.25 * GIB)
        self.assertEqual(one.row("RL").mem_bytes, 3.75 * GIB)
        self.assertEqual(eight.row("DJ").mem_bytes, 6.25 * GIB / 8)
        self.assertEqual(eight.row("FW").mem_bytes, 1.25 * GIB)
        self.assertEqual(eight.row("HB").mem_bytes, 0.0)

    def test_route_computation_shrinks_with_more_partitions(self) -> None:
        self.assertAlmostEqual(dj_cpu(8), 0.1116, places=4)
        self.assertAlmostEqual(dj_cpu(16), 0.049, places=3)
        self.assertGreater(dj_cpu(2), dj_cpu(4))

    def test_packet_in_apps_scale_with_load(self) -> None:
        half = profile_demands(ProfileTemplate(partition_count=8, load=25_000))
        self.assertAlmostEqual(half.row("RL").cpu, 0.225)
        self.assertAlmostEqual(half.row("FW").cpu, 0.035)
        self.assertAlmostEqual(half.row("HB").cpu, 0.03)

    def test_packet_in_service_splits_by_cpu_share(self) -> None:
        self.assertAlmostEqual(RL_SERVICE_MS + FW_SERVICE_MS, 0.02)
        self.assertAlmostEqual(RL_SERVICE_MS / FW_SERVICE_MS, 0.45 / 0.07)

    def test_app_models_skip_rows_without_service_time(self) -> None:
        profile = profile_demands(ProfileTemplate(partition_count=8))
        self.assertEqual([a.app_id for a in profile.app_models()], ["RL", "FW", "HB"])

        timed = profile_demands(ProfileTemplate(partition_count=8, dj_service_ms=2500.0))
        models = {a.app_id: a for a in timed.app_models("exponential")}
        self.assertEqual(models["DJ"].service_dist, "deterministic")
        self.assertEqual(models["RL"].service_dist, "exponential")

    def test_default_server_is_one_core_minus_idle(self) -> None:
        placement = RunConfig().placement
        self.assertAlmostEqual(placement.cpu_capacity, 1.0 - IDLE_CPU)
        self.assertEqual(placement.mem_capacity_bytes, 16 * GIB)


if __name__ == "__main__":
    unittest.main()
