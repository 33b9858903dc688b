# app/tooling/seeding.py
from __future__ import annotations

import numpy as np


def rng_for(seed: int, *keys: int) -> np.random.Generator:
    """Independent stream for (seed, *keys); the same key tuple always yields the same stream."""
    return np.random.default_rng([int(seed), *(int(k) for k in keys)])
