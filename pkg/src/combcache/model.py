"""Library, cache contents and delivery transcripts.

Payloads are numpy arrays of field symbols; labels are recovered from the
subset tables, so a cache holding millions of pieces stays a handful of arrays.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .coding.bits import BitBuffer, symbol_dtype
from .coding.otp import KeyId, KeyRegistry, format_key_id
from .coding.randomness import draw_symbols
from .params import SchemeParams
from .subsets import label


class DemandError(ValueError):
    pass


def check_demand(demand, K: int, D: int) -> tuple[int, ...]:
    d = tuple(int(x) for x in demand)
    if len(d) != K:
        raise DemandError(f"demand has {len(d)} entries, expected K={K}")
    bad = [x for x in d if not 1 <= x <= D]
    if bad:
        raise DemandError(f"requested file(s) {bad} outside 1..{D}")
    return d


@dataclass(frozen=True, eq=False)
class Library:
    files: np.ndarray   # (D, F / width) symbols
    width: int = 8

    @property
    def D(self) -> int:
        return self.files.shape[0]

    @property
    def F(self) -> int:
        return self.files.shape[1] * self.width

    def file(self, n: int) -> BitBuffer:
        return BitBuffer(self.files[n - 1], self.width)

    @classmethod
    def random(cls, D: int, F: int, width: int, rng) -> "Library":
        if F % width:
            raise ValueError(f"F={F} is not a whole number of {width}-bit symbols")
        return cls(draw_symbols(rng, (D, F // width), width), width)

    @classmethod
    def from_buffers(cls, buffers: list[BitBuffer]) -> "Library":
        widths = {b.width for b in buffers}
        sizes = {b.length_bits for b in buffers}
        if len(widths) != 1 or len(sizes) != 1:
            raise ValueError("library files must share size and symbol width")
        return cls(np.stack([b.symbols for b in buffers]), widths.pop())


def _bits(width: int, *arrays) -> int:
    return width * sum(int(a.size) for a in arrays if a is not None)


@dataclass
class RelayCache:
    relay: int
    width: int
    part1: np.ndarray                 # (D, part1) f^{j,1}_n for all n
    unicast_keys: np.ndarray          # (Khat, key) K^j_rho, empty when unkeyed
    unicast_key_ids: tuple

    @property
    def bits(self) -> int:
        return _bits(self.width, self.part1, self.unicast_keys)

    def labels(self) -> list[str]:
        out = [f"f^{{{self.relay},1}}_{{{n}}}" for n in range(1, self.part1.shape[0] + 1)]
        return out + [format_key_id(k) for k in self.unicast_key_ids]


@dataclass
class UserSlot:
    """Everything user k caches on behalf of one connected relay j."""

    relay: int
    rank: int
    shared: bool
    part1_blocks: np.ndarray          # (D, t1, block) cached blocks of f^{j,1}_n
    block_ids: tuple                  # which of the Khat blocks (0-based)
    items: np.ndarray                 # (D, n_cached, item) pieces or shares
    item_labels: tuple                # subset T of each cached item
    multicast_keys: np.ndarray        # (n_fwd, item) K^j_S with rank in S
    multicast_key_ids: tuple
    unicast_key: np.ndarray | None
    unicast_key_id: KeyId | None

    def bits(self, width: int) -> int:
        return _bits(width, self.part1_blocks, self.items, self.multicast_keys, self.unicast_key)

    def labels(self) -> list[str]:
        j = self.relay
        D = self.items.shape[0]
        out = []
        for n in range(1, D + 1):
            if self.part1_blocks.size:
                out += [f"f^{{{j},1}}_{{{n},b{b + 1}}}" for b in self.block_ids]
            for T in self.item_labels:
                out.append(f"S^{{{j}}}_{{{n},{label(T)}}}" if self.shared else f"f^{{{j},2}}_{{{n},{label(T)}}}")
        out += [format_key_id(k) for k in self.multicast_key_ids]
        if self.unicast_key_id is not None:
            out.append(format_key_id(self.unicast_key_id))
        return out


@dataclass
class UserCache:
    user: int
    width: int
    slots: dict  # relay -> UserSlot

    @property
    def bits(self) -> int:
        return sum(s.bits(self.width) for s in self.slots.values())

    def labels(self) -> list[str]:
        return [lab for j in sorted(self.slots) for lab in self.slots[j].labels()]

    def item_labels(self, relay: int) -> tuple:
        return self.slots[relay].item_labels


@dataclass
class ServerState:
    """Encoded material the server keeps to build delivery signals."""

    items: dict           # relay -> (D, n_items, item)
    multicast_keys: dict  # relay -> (n_signals, item)
    multicast_key_ids: dict


@dataclass
class PlacementResult:
    params: SchemeParams
    F: int
    relays: dict          # relay -> RelayCache
    users: dict           # user -> UserCache
    server: ServerState
    registry: KeyRegistry | None = None

    @property
    def width(self) -> int:
        return self.params.width

    def relay_bits(self, j: int) -> int:
        return self.relays[j].bits

    def user_bits(self, k: int) -> int:
        return self.users[k].bits

    def memory_report(self) -> dict:
        """Cached bits per node against N*F and M*F."""
        p = self.params
        return {
            "relay_bits": {j: c.bits for j, c in self.relays.items()},
            "user_bits": {k: c.bits for k, c in self.users.items()},
            "relay_target": p.N * self.F,
            "user_target": p.M * self.F,
        }

    def memory_equalities_hold(self) -> bool:
        rep = self.memory_report()
        return (all(Fraction(b) == rep["relay_target"] for b in rep["relay_bits"].values())
                and all(Fraction(b) == rep["user_target"] for b in rep["user_bits"].values()))


@dataclass
class RelayMessage:
    """Y_{j,d,k}: the relay's own top-up part plus forwarded sub-signals."""

    relay: int
    user: int
    rank: int
    width: int
    topup: np.ndarray
    topup_key: KeyId | None
    forwarded_labels: tuple
    forwarded: np.ndarray

    @property
    def bits(self) -> int:
        return _bits(self.width, self.topup, self.forwarded)


@dataclass
class RelayTranscript:
    relay: int
    width: int
    signal_labels: tuple
    signals: np.ndarray               # X^S_{j,d} stacked in subset order
    signal_keys: tuple                # key id per signal, or None
    messages: dict = field(default_factory=dict)   # user -> RelayMessage

    @property
    def server_bits(self) -> int:
        return _bits(self.width, self.signals)


@dataclass
class DeliveryTranscript:
    params: SchemeParams
    F: int
    demand: tuple
    relays: dict          # relay -> RelayTranscript

    def server_bits(self, j: int) -> int:
        return self.relays[j].server_bits

    def relay_bits(self, j: int, k: int) -> int:
        return self.relays[j].messages[k].bits

    def server_loads(self) -> dict:
        return {j: t.server_bits for j, t in self.relays.items()}

    def relay_loads(self) -> dict:
        return {(j, k): m.bits for j, t in self.relays.items() for k, m in t.messages.items()}

    def messages_for(self, k: int) -> dict:
        return {j: self.relays[j].messages[k] for j in self.params.topology.relays_of(k)}

    def symmetric(self) -> bool:
        return len(set(self.server_loads().values())) == 1 and len(set(self.relay_loads().values())) == 1

    def rates(self) -> tuple[Fraction, Fraction]:
        """Normalized (R1, R2); requires symmetric loads."""
        if not self.symmetric():
            raise ValueError("link loads are not symmetric")
        s = next(iter(self.server_loads().values()))
        u = next(iter(self.relay_loads().values()))
        return Fraction(s, self.F), Fraction(u, self.F)

    def eavesdropper_view(self) -> np.ndarray:
        """Every delivery-phase bit on every link, in a fixed order."""
        parts = []
        w = self.params.width
        for j in sorted(self.relays):
            t = self.relays[j]
            parts.append(t.signals.reshape(-1))
            for k in sorted(t.messages):
                m = t.messages[k]
                parts.append(m.topup.reshape(-1))
                parts.append(m.forwarded.reshape(-1))
        sym = np.concatenate(parts) if parts else np.zeros(0, symbol_dtype(w))
        return BitBuffer(sym, w).bits()
