"""Randomness sources for placement.

Placement code draws symbols through :func:`draw_symbols`, which accepts a
numpy ``Generator`` for normal runs or a :class:`ScriptedRandomness` when an
audit needs to pin every random bit.
"""
from __future__ import annotations

import numpy as np

from .bits import bits_to_symbols, symbol_dtype


def make_rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def spawn(seed, n: int) -> list[np.random.Generator]:
    """Independent child generators derived from one experiment seed."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return [np.random.default_rng(s) for s in ss.spawn(n)]


class ScriptedRandomness:
    """Hands out a fixed bit string, in draw order."""

    def __init__(self, bits):
        self.bits = np.asarray(bits, dtype=np.uint8).reshape(-1)
        self.pos = 0

    def symbols(self, shape, width: int) -> np.ndarray:
        n = int(np.prod(shape)) * width
        if self.pos + n > self.bits.size:
            raise RuntimeError("scripted randomness exhausted")
        chunk = self.bits[self.pos:self.pos + n]
        self.pos += n
        return bits_to_symbols(chunk, width).reshape(shape)

    @property
    def remaining(self) -> int:
        return self.bits.size - self.pos


class CountingRandomness:
    """Returns zeros and records how many random bits were requested."""

    def __init__(self):
        self.used = 0

    def symbols(self, shape, width: int) -> np.ndarray:
        self.used += int(np.prod(shape)) * width
        return np.zeros(shape, dtype=symbol_dtype(width))


def draw_symbols(rng, shape, width: int) -> np.ndarray:
    if isinstance(rng, np.random.Generator):
        return rng.integers(0, 1 << width, size=shape, dtype=np.uint32).astype(symbol_dtype(width))
    return rng.symbols(shape, width)
