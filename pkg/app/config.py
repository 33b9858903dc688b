# app/config.py
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import List, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from app.errors import ConfigError
from app.simengine.demand_profile import REFERENCE_LOAD, SERVER_CPU, SERVER_MEM
from app.simengine.sim_models import ServiceDistribution
from app.settings import settings

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1

Strategy = Literal["optimized", "topological"]


class TopologyConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    pods: int = 32
    tors_per_pod: int = 32
    aggs_per_pod: int = 32
    core_count: int = 512
    # Explicit edge list for non-fat-tree experiments; replaces the generator when set.
    edge_list: List[List[int]] | None = None
    core_switches: List[int] = []


class ConvergenceConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    partition_counts: List[int] = [1, 2, 4, 8, 16, 32]
    failures_per_count: int = Field(default=100, ge=1)
    compute_coeff_s: float = Field(default_factory=lambda: settings.compute_coeff_s, gt=0.0)
    advert_latency_s: float = Field(default_factory=lambda: settings.advert_latency_s, gt=0.0)
    rounds_rule: Literal["broadcast", "flat"] = "broadcast"


class PlacementConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    partition_count: int | None = None
    servers: int = Field(default=16, ge=1)
    cpu_capacity: float = Field(default=SERVER_CPU, gt=0.0)
    mem_capacity_bytes: float = Field(default=float(SERVER_MEM), gt=0.0)
    strategy: Strategy = "optimized"
    load: float = Field(default=REFERENCE_LOAD, ge=0.0)
    isolate: bool = True
    enforce_deadlines: bool = False
    slack: float = Field(default=1.0, ge=1.0)
    hop_ms: float = Field(default_factory=lambda: settings.cross_server_hop_ms, ge=0.0)
    graph_path: str | None = None


class SimulationConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    packet_in_rate: float = Field(default=REFERENCE_LOAD, ge=0.0)
    packet_in_path: List[str] = ["FW", "RL"]
    heartbeat_rate: float = Field(default=10.0, ge=0.0)
    heartbeat_deadline_ms: float = Field(default=100.0, gt=0.0)
    link_failure_interval_s: float | None = Field(default=10.0, gt=0.0)
    cross_server_hop_ms: float = Field(default_factory=lambda: settings.cross_server_hop_ms, ge=0.0)
    prioritization: bool = True
    duration_s: float = Field(default=15.0, gt=0.0)
    simulated_partitions: List[int] = [0]
    saturation_rates: List[float] = []
    service_dist: ServiceDistribution = "deterministic"


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: int = SCHEMA_VERSION
    seed: int = 0
    topology: TopologyConfig = TopologyConfig()
    convergence: ConvergenceConfig = ConvergenceConfig()
    placement: PlacementConfig = PlacementConfig()
    simulation: SimulationConfig = SimulationConfig()


def parse_config(text: str) -> RunConfig:
    try:
        config = RunConfig.model_validate_json(text)
    except ValidationError as exc:
        raise ConfigError(f"Invalid run config [errors={exc.error_count()}]: {exc}") from exc
    if config.schema_version != SCHEMA_VERSION:
        raise ConfigError(f"Unsupported schema_version [found={config.schema_version}, supported={SCHEMA_VERSION}]")
    return config


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig()
    source = Path(path)
    try:
        text = source.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"Config file unreadable [path={source}]") from exc
    config = parse_config(text)
    log.debug("Config loaded [path=%s, seed=%s]", source, config.seed)
    return config


def dump_config(config: RunConfig) -> str:
    return json.dumps(config.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"
