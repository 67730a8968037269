"""One-time-pad keys and the registry that enforces single use."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .bits import BitBuffer
from .randomness import draw_symbols

KeyId = tuple


class KeyMisuseError(ValueError):
    """Base class for key misuse."""


class KeyReuseError(KeyMisuseError):
    pass


class KeyLengthError(KeyMisuseError):
    pass


@dataclass(frozen=True)
class Key:
    key_id: KeyId
    data: BitBuffer

    @property
    def length_bits(self) -> int:
        return self.data.length_bits


def format_key_id(key_id: KeyId) -> str:
    if not (isinstance(key_id, tuple) and len(key_id) == 3):
        return str(key_id)
    kind, relay, tag = key_id
    if kind == "multicast":
        return f"K^{relay}_{{{''.join(str(x) for x in tag)}}}"
    return f"K^{relay}_{tag}"


@dataclass
class KeyRegistry:
    """Single-writer store of generated keys and their consumption count."""

    width: int = 8
    _keys: dict = dc_field(default_factory=dict)
    _uses: dict = dc_field(default_factory=dict)

    def generate(self, key_id: KeyId, length_bits: int, rng) -> Key:
        if length_bits % self.width:
            raise KeyLengthError(f"{length_bits}-bit key is not whole {self.width}-bit symbols")
        data = draw_symbols(rng, (length_bits // self.width,), self.width)
        return self.add(key_id, data)

    def generate_block(self, key_ids: list[KeyId], length_bits: int, rng) -> np.ndarray:
        """Draw one key per id; returns the (len(ids), symbols) array."""
        if length_bits % self.width:
            raise KeyLengthError(f"{length_bits}-bit key is not whole {self.width}-bit symbols")
        block = draw_symbols(rng, (len(key_ids), length_bits // self.width), self.width)
        for kid, row in zip(key_ids, block):
            self.add(kid, row)
        return block

    def add(self, key_id: KeyId, symbols: np.ndarray) -> Key:
        if key_id in self._keys:
            raise KeyReuseError(f"key {format_key_id(key_id)} generated twice")
        key = Key(key_id, BitBuffer(symbols, self.width))
        self._keys[key_id] = key
        self._uses[key_id] = 0
        return key

    def get(self, key_id: KeyId) -> Key:
        return self._keys[key_id]

    def __contains__(self, key_id):
        return key_id in self._keys

    def __len__(self):
        return len(self._keys)

    def ids(self):
        return list(self._keys)

    def consume(self, key_id: KeyId) -> Key:
        if key_id not in self._keys:
            raise KeyMisuseError(f"unknown key {key_id!r}")
        if self._uses[key_id]:
            raise KeyReuseError(f"key {format_key_id(key_id)} already consumed")
        self._uses[key_id] += 1
        return self._keys[key_id]

    def uses(self, key_id: KeyId) -> int:
        return self._uses.get(key_id, 0)

    def total_bits(self) -> int:
        return sum(k.length_bits for k in self._keys.values())


def keygen(rng, length_bits: int, key_id: KeyId, registry: KeyRegistry | None = None, width: int = 8) -> Key:
    if registry is None:
        registry = KeyRegistry(width)
    return registry.generate(key_id, length_bits, rng)


def otp(data: BitBuffer, key: Key, registry: KeyRegistry | None = None) -> BitBuffer:
    """XOR ``data`` with ``key``.  Passing a registry spends the key."""
    if data.length_bits != key.length_bits:
        raise KeyLengthError(f"{data.length_bits}-bit data with {key.length_bits}-bit key")
    if registry is not None:
        registry.consume(key.key_id)
    return data ^ key.data
