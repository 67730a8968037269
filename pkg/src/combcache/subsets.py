"""Index tables for subset-labelled pieces.

Pieces (or shares) of an encoded symbol are labelled by t-subsets T of
{1..Khat}; multicast sub-signals by (t+1)-subsets S.  Both are enumerated in
lexicographic order and referred to by position in that order.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np


@lru_cache(maxsize=None)
def subsets(n: int, t: int) -> tuple[tuple[int, ...], ...]:
    if t < 0 or t > n:
        return ()
    return tuple(combinations(range(1, n + 1), t))


@lru_cache(maxsize=None)
def subset_rank(n: int, t: int) -> dict:
    return {s: i for i, s in enumerate(subsets(n, t))}


def label(s) -> str:
    return "".join(str(x) for x in s) if s else "{}"


@dataclass(frozen=True)
class RankView:
    """What the user with rank ``rho`` at a relay caches and receives."""

    cached: np.ndarray          # item positions with rho in T
    cached_pos: np.ndarray      # item position -> slot in ``cached`` (-1 if absent)
    forwarded: np.ndarray       # signal positions with rho in S
    target: np.ndarray          # item position S \ {rho} for each forwarded S
    other_ranks: np.ndarray     # (len(forwarded), t) ranks rho' in S \ {rho}
    other_slots: np.ndarray     # (len(forwarded), t) cached slot of S \ {rho'}


@dataclass(frozen=True)
class SubsetTables:
    khat: int
    t: int
    items: tuple                # t-subsets
    signals: tuple              # (t+1)-subsets
    signal_ranks: np.ndarray    # (n_signals, t+1) members of S
    signal_items: np.ndarray    # (n_signals, t+1) position of S \ {member}
    views: tuple                # RankView per rho (index rho-1)

    @property
    def n_items(self) -> int:
        return len(self.items)

    @property
    def n_signals(self) -> int:
        return len(self.signals)

    def view(self, rho: int) -> RankView:
        return self.views[rho - 1]


@lru_cache(maxsize=None)
def tables(khat: int, t: int) -> SubsetTables:
    items = subsets(khat, t)
    sigs = subsets(khat, t + 1)
    irank = subset_rank(khat, t)
    ns = len(sigs)
    sig_ranks = np.array(sigs, dtype=np.int64).reshape(ns, t + 1)
    sig_items = np.zeros((ns, t + 1), dtype=np.int64)
    for si, S in enumerate(sigs):
        for p, rho in enumerate(S):
            sig_items[si, p] = irank[tuple(x for x in S if x != rho)]
    views = []
    for rho in range(1, khat + 1):
        cached = np.array([i for i, T in enumerate(items) if rho in T], dtype=np.int64)
        cached_pos = np.full(len(items), -1, dtype=np.int64)
        cached_pos[cached] = np.arange(cached.size)
        fwd = [si for si, S in enumerate(sigs) if rho in S]
        target = np.zeros(len(fwd), dtype=np.int64)
        o_ranks = np.zeros((len(fwd), t), dtype=np.int64)
        o_slots = np.zeros((len(fwd), t), dtype=np.int64)
        for q, si in enumerate(fwd):
            S = sigs[si]
            others = [p for p, x in enumerate(S) if x != rho]
            target[q] = sig_items[si, S.index(rho)]
            o_ranks[q] = [S[p] for p in others]
            o_slots[q] = [cached_pos[sig_items[si, p]] for p in others]
        views.append(RankView(cached, cached_pos, np.array(fwd, dtype=np.int64), target, o_ranks, o_slots))
    return SubsetTables(khat, t, items, sigs, sig_ranks, sig_items, tuple(views))
