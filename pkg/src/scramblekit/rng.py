"""Counter-based random streams.

Every stream is a Philox generator whose key is derived from the master seed
and an integer tuple naming the unit of work, so the numbers a realization
sees never depend on which worker ran it or in what order.
"""

from __future__ import annotations

from typing import Union

import numpy as np

SeedLike = Union[int, np.random.Generator, np.random.SeedSequence, None]


def stream(seed: int, *key: int) -> np.random.Generator:
    """Return the generator for ``key`` under master ``seed``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.Philox(seed))
    if seed is None:
        return np.random.Generator(np.random.Philox())
    return stream(seed)


def seed_label(seed: SeedLike) -> str:
    """Printable tag for a seed argument; generators carry no recoverable seed."""
    if isinstance(seed, (int, np.integer)):
        return str(int(seed))
    if isinstance(seed, np.random.SeedSequence):
        return ":".join(str(v) for v in (seed.entropy, *seed.spawn_key))
    return "-"
