"""Deterministic substream seeding for reproducible (and parallelizable) sampling."""

import numpy as np

# Fixed stream ids keep seed paths for unrelated sampling purposes disjoint.
DROP_STREAM = 1
FADING_STREAM = 2
AQNM_STREAM = 3

_MASK64 = (1 << 64) - 1


def substream(seed: int, stream: int, *path: int) -> np.random.Generator:
    """Generator keyed by (seed, stream, *path).

    The same key always yields the same stream, independent of how many
    other substreams were drawn before it, so trials can run in any order
    (or concurrently) without changing results.
    """
    key = [int(seed) & _MASK64, int(stream) & _MASK64]
    key.extend(int(p) & _MASK64 for p in path)
    return np.random.default_rng(key)


def derived_seed(seed: int, index: int) -> int:
    """Stable 64-bit seed for the ``index``-th child of ``seed``."""
    ss = np.random.SeedSequence([int(seed) & _MASK64, int(index) & _MASK64])
    return int(ss.generate_state(1, dtype=np.uint64)[0])
