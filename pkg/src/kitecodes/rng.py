"""Seeded, splittable random streams.

Every consumer of randomness gets its own PCG64 stream derived from the
master seed and a fixed spawn key, so reproducibility never depends on the
order in which unrelated components draw.

Key layout (first element is a domain tag):

* ``(CONSTRUCTION, ell)`` -- H_v block for subinterval ``ell`` (1..19)
* ``(CONSTRUCTION, 0)``   -- accumulator (H_w) columns, ascending ``t``
* ``(BER, point, frame)`` -- information bits and noise for a BER frame
* ``(HARQ, point, frame)`` -- one HARQ session
* ``(OPTIMIZER, ell, frame)`` -- channel frames for the design objective
"""

from __future__ import annotations

import numpy as np

CONSTRUCTION = 1
BER = 2
HARQ = 3
OPTIMIZER = 4

SEED_MASK = (1 << 64) - 1


def stream(seed: int, *key: int) -> np.random.Generator:
    if seed < 0 or seed > SEED_MASK:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(x) for x in key))
    return np.random.Generator(np.random.PCG64(ss))
