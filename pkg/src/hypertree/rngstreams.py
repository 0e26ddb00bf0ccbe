"""Reproducible per-trial random streams.

Every random decision in the package flows through a Philox generator keyed
by (seed, stream).  Streams are cheap to derive independently, so trials can
run in any order, on any number of workers, and reproduce bit-for-bit.
"""

from __future__ import annotations

import numpy as np

U128_DEN = 1 << 128


def trial_rng(seed: int, stream: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(ss))


def uniform_u128(rng: np.random.Generator) -> int:
    """A 128-bit integer; u / 2**128 is the dyadic uniform variate."""
    hi, lo = rng.integers(0, 1 << 64, size=2, dtype=np.uint64)
    return (int(hi) << 64) | int(lo)


class BufferedIntegers:
    """Batched rng.integers(0, bound) to keep per-draw overhead low."""

    def __init__(self, rng: np.random.Generator, bound: int, batch: int = 4096):
        self.rng = rng
        self.bound = bound
        self.batch = batch
        self._buf: np.ndarray | None = None
        self._pos = 0

    def draw(self) -> int:
        if self._buf is None or self._pos == len(self._buf):
            self._buf = self.rng.integers(0, self.bound, size=self.batch)
            self._pos = 0
        value = int(self._buf[self._pos])
        self._pos += 1
        return value
