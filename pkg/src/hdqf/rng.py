"""Seeded, splittable random streams.

Every stochastic routine in this package draws from a Philox counter-based
generator addressed by (seed, *stream path). Using a path instead of ad-hoc
seed arithmetic keeps independent components (codebooks, measurement shots,
noise trajectories, ...) on provably disjoint streams and makes every run
bit-exactly reproducible, including under parallel fan-out.
"""

from __future__ import annotations

import numpy as np

__all__ = ["stream", "split"]


def stream(seed: int, *path: int) -> np.random.Generator:
    """Return the Philox generator for stream (seed, *path)."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def split(seed: int, base_path: tuple[int, ...], n: int) -> list[np.random.Generator]:
    """n disjoint child streams under (seed, *base_path), one per worker/trial."""
    return [stream(seed, *base_path, i) for i in range(n)]
