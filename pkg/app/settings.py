# settings.py
from __future__ import annotations

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

TOOL_VERSION = "0.1.0"


class Settings(BaseSettings):
    # Communication graph / placement
    cross_server_hop_ms: float = 0.5
    exact_ceiling: int = 14

    # Multilevel partitioner
    coarsen_min_vertices: int = 32
    coarsen_min_reduction: float = 0.10
    refine_passes: int = 8
    partition_trials: int = 8
    partition_search_budget: int = 50000

    # Convergence cost model (seconds)
    compute_coeff_s: float = 6.0e-4
    advert_latency_s: float = 0.48

    # Simulator
    warmup_fraction: float = 0.10
    dj_quantum_ms: float = 10.0

    # Runtime
    log_level: str = "INFO"
    jobs: int = 1

    model_config = SettingsConfigDict(
        env_prefix="SLICEPLAN_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    @field_validator("*", mode="before")
    @classmethod
    def _reject_blank_and_negative(cls, value):
        if isinstance(value, str):
            cleaned = value.strip()
            if not cleaned:
                raise ValueError("Empty environment values are not allowed")
            return cleaned
        if isinstance(value, (int, float)) and value < 0:
            raise ValueError("Negative tunables are not allowed")
        return value


settings = Settings()
