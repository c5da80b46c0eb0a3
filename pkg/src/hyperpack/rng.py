"""Named, seedable random streams.

Every consumer asks for ``stream(seed, name, *ids)``; the same key always
yields the same Philox generator, and distinct keys are independent. This
keeps permutations, labels and sampling reproducible regardless of the
order in which they are requested.
"""

from __future__ import annotations

import zlib

import numpy as np


def _key_word(part) -> int:
    if isinstance(part, (int, np.integer)):
        if part < 0:
            raise ValueError(f"stream ids must be non-negative, got {part}")
        return int(part)
    return zlib.crc32(str(part).encode())


def stream(seed: int, *key) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(_key_word(p) for p in key))
    return np.random.Generator(np.random.Philox(ss))
