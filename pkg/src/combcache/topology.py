"""Combination network C(h, r): a server, h relays, and one end user per
r-subset of relays.

Users are numbered 1..K in lexicographic order of their relay subsets, so for
h=5, r=2 user 1 hangs off relays {1,2}, user 5 off {2,3} and so on.  All ids
exposed here are 1-based.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from math import comb


class TopologyError(ValueError):
    pass


@dataclass(frozen=True)
class Topology:
    h: int
    r: int
    user_relays: tuple[tuple[int, ...], ...]   # index k-1 -> N(U_k)
    relay_users: tuple[tuple[int, ...], ...]   # index j-1 -> N(Gamma_j), ascending
    index_table: dict                           # (j, k) -> rank in 1..Khat

    @property
    def K(self) -> int:
        return len(self.user_relays)

    @property
    def Khat(self) -> int:
        return comb(self.h - 1, self.r - 1)

    @property
    def relays(self) -> range:
        return range(1, self.h + 1)

    @property
    def users(self) -> range:
        return range(1, self.K + 1)

    def relays_of(self, k: int) -> tuple[int, ...]:
        return self.user_relays[k - 1]

    def users_of(self, j: int) -> tuple[int, ...]:
        return self.relay_users[j - 1]

    def user_at(self, j: int, rank: int) -> int:
        return self.relay_users[j - 1][rank - 1]

    def index_of(self, j: int, k: int) -> int:
        try:
            return self.index_table[(j, k)]
        except KeyError:
            raise TopologyError(f"user {k} is not connected to relay {j}") from None

    def to_dict(self) -> dict:
        return {
            "h": self.h,
            "r": self.r,
            "K": self.K,
            "Khat": self.Khat,
            "user_relays": [list(s) for s in self.user_relays],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    # Structural equality; index_table is derived from the other fields.
    def __eq__(self, other):
        if not isinstance(other, Topology):
            return NotImplemented
        return (self.h, self.r, self.user_relays) == (other.h, other.r, other.user_relays)

    def __hash__(self):
        return hash((self.h, self.r))


def build_topology(h: int, r: int) -> Topology:
    if not (isinstance(h, int) and isinstance(r, int)):
        raise TopologyError("h and r must be integers")
    if r < 1 or r >= h:
        raise TopologyError(f"need 1 <= r < h, got h={h}, r={r}")
    user_relays = tuple(combinations(range(1, h + 1), r))
    relay_users = [[] for _ in range(h)]
    for k, rel in enumerate(user_relays, start=1):
        for j in rel:
            relay_users[j - 1].append(k)
    index_table = {}
    for j, users in enumerate(relay_users, start=1):
        for rank, k in enumerate(users, start=1):
            index_table[(j, k)] = rank
    return Topology(h, r, user_relays, tuple(tuple(u) for u in relay_users), index_table)


def index_of(t: Topology, j: int, k: int) -> int:
    return t.index_of(j, k)
