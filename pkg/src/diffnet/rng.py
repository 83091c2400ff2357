"""Deterministic random streams.

Every random draw in this package flows through a numpy PCG64 generator
keyed by an explicit integer tuple, so a (seed, index, ...) key names the
same stream on every run and under any worker count.  Streams for distinct
keys are statistically independent (numpy SeedSequence semantics).
"""
from __future__ import annotations

import numpy as np

BIT_GENERATOR = "PCG64"

_U64 = (1 << 64) - 1


def stream(seed: int, *key: int) -> np.random.Generator:
    """Return the generator for the stream named by (seed, *key)."""
    entropy = [seed & _U64] + [k & _U64 for k in key]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))
