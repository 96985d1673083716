"""Counter-based random streams.

Every Monte Carlo routine derives one Philox stream per fixed-size batch of
trials, keyed by (master seed, batch index).  Trial t always draws from row
t % batch of batch t // batch, so results for a given (seed, trials) pair are
bit-identical no matter how batches are scheduled across worker threads.
"""

from __future__ import annotations

import numpy as np


def derived_stream(seed: int, index: int) -> np.random.Generator:
    key = np.array([np.uint64(seed), np.uint64(index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def subseed(seed: int, *path: int) -> int:
    """Independent master seed for a named sub-experiment of `seed`."""
    return int(np.random.SeedSequence(entropy=seed, spawn_key=path).generate_state(1)[0])


def batch_ranges(trials: int, batch: int):
    """Yield (batch_index, start, stop) covering range(trials)."""
    for b, start in enumerate(range(0, trials, batch)):
        yield b, start, min(start + batch, trials)
