"""Bit-addressable buffers stored as arrays of w-bit field symbols."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def symbol_dtype(width: int):
    return np.uint8 if width <= 8 else np.uint16


def symbols_to_bits(symbols: np.ndarray, width: int) -> np.ndarray:
    """Expand symbols MSB-first into a flat 0/1 uint8 array."""
    s = np.asarray(symbols).reshape(-1).astype(np.uint32)
    shifts = np.arange(width - 1, -1, -1, dtype=np.uint32)
    return ((s[:, None] >> shifts[None, :]) & 1).astype(np.uint8).reshape(-1)


def bits_to_symbols(bits: np.ndarray, width: int) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.uint32).reshape(-1)
    if bits.size % width:
        raise ValueError(f"{bits.size} bits is not a whole number of {width}-bit symbols")
    weights = (1 << np.arange(width - 1, -1, -1, dtype=np.uint32))
    vals = (bits.reshape(-1, width) * weights).sum(axis=1)
    return vals.astype(symbol_dtype(width))


@dataclass(frozen=True, eq=False)
class BitBuffer:
    """An immutable run of bits, held as ``width``-bit symbols.

    Offsets and lengths are in bits but must fall on symbol boundaries.
    """

    symbols: np.ndarray
    width: int = 8

    def __post_init__(self):
        arr = np.ascontiguousarray(self.symbols, dtype=symbol_dtype(self.width)).reshape(-1)
        if arr.size and int(arr.max()) >= (1 << self.width):
            raise ValueError("symbol value exceeds field width")
        arr.setflags(write=False)
        object.__setattr__(self, "symbols", arr)

    @classmethod
    def zeros(cls, length_bits: int, width: int = 8) -> "BitBuffer":
        return cls(np.zeros(_symbols_for(length_bits, width), symbol_dtype(width)), width)

    @classmethod
    def from_bits(cls, bits, width: int = 8) -> "BitBuffer":
        return cls(bits_to_symbols(np.asarray(bits), width), width)

    @classmethod
    def from_bytes(cls, data: bytes, width: int = 8) -> "BitBuffer":
        bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
        return cls.from_bits(bits, width)

    @property
    def length_bits(self) -> int:
        return self.symbols.size * self.width

    def __len__(self):
        return self.length_bits

    def bits(self) -> np.ndarray:
        return symbols_to_bits(self.symbols, self.width)

    def to_bytes(self) -> bytes:
        return np.packbits(self.bits()).tobytes()

    def hex(self) -> str:
        return self.to_bytes().hex()

    def __eq__(self, other):
        if not isinstance(other, BitBuffer):
            return NotImplemented
        if self.length_bits != other.length_bits:
            return False
        if self.width == other.width:
            return bool(np.array_equal(self.symbols, other.symbols))
        return bool(np.array_equal(self.bits(), other.bits()))

    def __hash__(self):
        return hash((self.length_bits, self.to_bytes()))

    def __xor__(self, other: "BitBuffer") -> "BitBuffer":
        if self.length_bits != other.length_bits:
            raise ValueError(f"XOR of {self.length_bits}-bit and {other.length_bits}-bit buffers")
        if self.width != other.width:
            return BitBuffer.from_bits(self.bits() ^ other.bits(), self.width)
        return BitBuffer(self.symbols ^ other.symbols, self.width)

    def slice(self, offset_bits: int, length_bits: int) -> "BitBuffer":
        if offset_bits < 0 or length_bits < 0 or offset_bits + length_bits > self.length_bits:
            raise IndexError("slice out of range")
        lo = _symbols_for(offset_bits, self.width)
        n = _symbols_for(length_bits, self.width)
        return BitBuffer(self.symbols[lo:lo + n], self.width)

    def concat(self, *others: "BitBuffer") -> "BitBuffer":
        for o in others:
            if o.width != self.width:
                raise ValueError("cannot concatenate buffers of different symbol width")
        return BitBuffer(np.concatenate([self.symbols] + [o.symbols for o in others]), self.width)

    def __repr__(self):
        h = self.hex()
        if len(h) > 16:
            h = h[:16] + "..."
        return f"BitBuffer({self.length_bits} bits, w={self.width}, {h})"


def _symbols_for(nbits: int, width: int) -> int:
    if nbits % width:
        raise ValueError(f"{nbits} bits does not fall on a {width}-bit symbol boundary")
    return nbits // width
