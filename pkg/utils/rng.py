"""Seeded random streams.

Every generator in the repo draws from numpy's PCG64 bit generator, seeded
through a SeedSequence built from the user seed plus integer stream ids
(record index, retry attempt, purpose tag). Same (seed, streams) gives the
same draws on every platform running the same numpy PCG64 implementation.
"""

from typing import Union

import numpy as np

SeedLike = Union[int, np.random.Generator]

# purpose tags keep independent streams apart
STREAM_MASKS = 1
STREAM_SHUFFLE = 2
STREAM_VALIDATION = 3
STREAM_INIT = 4
STREAM_NOISE = 5
STREAM_SAMPLES = 6


def make_rng(seed: SeedLike, *streams: int) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        if streams:
            child = int(seed.integers(0, 2**63 - 1))
            return make_rng(child, *streams)
        return seed
    entropy = [int(seed)] + [int(s) for s in streams]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))
