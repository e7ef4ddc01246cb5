"""Per-round random streams.

Every round draws from its own Philox4x64-10 generator (a counter-based
bit generator) keyed through ``numpy.random.SeedSequence(seed,
spawn_key=(round_id,))``. A round's randomness therefore depends only on
``(seed, round_id)``, never on which worker ran it or in what order, which is
what lets serial and parallel runs agree exactly.
"""

from __future__ import annotations

import numpy as np

MAX_SEED = 2**64 - 1


def stream(seed: int, *key: int) -> np.random.Generator:
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def round_stream(seed: int, round_id: int) -> np.random.Generator:
    return stream(seed, round_id)


def uniform(rng: np.random.Generator) -> float:
    return float(rng.random())


def choose(rng: np.random.Generator, options):
    return options[int(rng.integers(len(options)))]
