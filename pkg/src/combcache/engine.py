"""Placement, delivery and decoding shared by all four schemes.

All schemes follow the same skeleton: MDS-encode each file into h symbols,
hand symbol j to relay j, keep the first part f^{j,1} at the relay, and cut the
second part f^{j,2} into items labelled by t-subsets of the relay's users.
Items are plain pieces ((0, n) sharing) or ramp shares.  Keyed schemes pad
every delivery payload with a fresh key.
"""
from __future__ import annotations

import numpy as np

from .coding import mds, ramp
from .coding.bits import BitBuffer, symbol_dtype
from .coding.otp import KeyRegistry
from .model import (DeliveryTranscript, Library, PlacementResult, RelayCache, RelayMessage,
                    RelayTranscript, ServerState, UserCache, UserSlot, check_demand)
from .params import ParamError, SchemeParams
from .subsets import tables
from .topology import Topology


class DecodeError(RuntimeError):
    pass


def _xor_reduce(a: np.ndarray, axis: int) -> np.ndarray:
    return np.bitwise_xor.reduce(a, axis=axis)


def block_window(rank: int, khat: int, t1: int) -> tuple[list[int], list[int]]:
    """0-based blocks of f^{j,1} cached by the user of this rank, and the rest.

    The user caches t1 consecutive blocks starting at its own rank, wrapping
    around; the relay sends the remaining Khat - t1 blocks in ascending order.
    """
    cached = [(rank - 1 + i) % khat for i in range(t1)]
    rest = sorted(set(range(khat)) - set(cached))
    return cached, rest


def place(library: Library, topology: Topology, params: SchemeParams, rng) -> PlacementResult:
    if params.topology != topology:
        raise ParamError("params were built for a different topology")
    if library.D != params.D:
        raise ParamError(f"library has {library.D} files, params expect D={params.D}")
    if library.width != params.width:
        raise ParamError(f"library uses {library.width}-bit symbols, params need {params.width}")
    sz = params.sizes(library.F)
    w = params.width
    Kh, t = params.Khat, params.t2
    tab = tables(Kh, t)
    keyed = params.kind.keyed
    registry = KeyRegistry(w) if keyed else None

    enc = mds.encode_array(library.files, params.h, params.r, w)   # (D, h, symbol)
    relays, items_of, mk_of, mk_ids_of = {}, {}, {}, {}
    for j in topology.relays:
        sym = enc[:, j - 1, :]
        part1 = sym[:, :sz.part1].copy()
        part2 = sym[:, sz.part1:]
        items_of[j] = ramp.share_array(part2, params.share_m, params.share_n, w, rng)
        mk_ids, mk = (), np.zeros((tab.n_signals, sz.item), symbol_dtype(w))
        uk_ids, uk = (), np.zeros((0, sz.unicast_key), symbol_dtype(w))
        if keyed:
            if sz.item and tab.n_signals:
                mk_ids = tuple(("multicast", j, S) for S in tab.signals)
                mk = registry.generate_block(list(mk_ids), sz.item * w, rng)
            if sz.unicast_key:
                uk_ids = tuple(("unicast", j, rho) for rho in range(1, Kh + 1))
                uk = registry.generate_block(list(uk_ids), sz.unicast_key * w, rng)
        mk_of[j], mk_ids_of[j] = mk, mk_ids
        relays[j] = RelayCache(j, w, part1, uk, uk_ids)

    users = {}
    for k in topology.users:
        slots = {}
        for j in topology.relays_of(k):
            rho = topology.index_of(j, k)
            view = tab.view(rho)
            if params.uses_blocks:
                cached_blocks, _ = block_window(rho, Kh, params.t1)
                blocks = relays[j].part1.reshape(params.D, Kh, sz.block)[:, cached_blocks, :]
            else:
                cached_blocks, blocks = [], np.zeros((params.D, 0, 0), symbol_dtype(w))
            mk_ids = tuple(mk_ids_of[j][q] for q in view.forwarded) if mk_ids_of[j] else ()
            uk_id = relays[j].unicast_key_ids[rho - 1] if relays[j].unicast_key_ids else None
            slots[j] = UserSlot(
                relay=j, rank=rho, shared=params.kind.shared,
                part1_blocks=blocks, block_ids=tuple(cached_blocks),
                items=items_of[j][:, view.cached, :],
                item_labels=tuple(tab.items[i] for i in view.cached),
                multicast_keys=mk_of[j][view.forwarded] if mk_ids else np.zeros((0, sz.item), symbol_dtype(w)),
                multicast_key_ids=mk_ids,
                unicast_key=relays[j].unicast_keys[rho - 1].copy() if uk_id is not None else None,
                unicast_key_id=uk_id,
            )
        users[k] = UserCache(k, w, slots)
    return PlacementResult(params, library.F, relays, users,
                           ServerState(items_of, mk_of, mk_ids_of), registry)


def deliver(placement: PlacementResult, demand) -> DeliveryTranscript:
    p = placement.params
    topo = p.topology
    d = check_demand(demand, p.K, p.D)
    sz = p.sizes(placement.F)
    Kh = p.Khat
    tab = tables(Kh, p.t2)
    reg = placement.registry
    out = {}
    for j in topo.relays:
        users = topo.users_of(j)
        file_by_rank = np.array([d[k - 1] - 1 for k in users], dtype=np.int64)
        items = placement.server.items[j]
        files = file_by_rank[tab.signal_ranks - 1]
        X = _xor_reduce(items[files, tab.signal_items], axis=1)
        keys = (None,) * tab.n_signals
        if placement.server.multicast_key_ids[j]:
            keys = placement.server.multicast_key_ids[j]
            for kid in keys:
                reg.consume(kid)
            X = X ^ placement.server.multicast_keys[j]
        rt = RelayTranscript(j, p.width, tab.signals, X, keys)

        cache = placement.relays[j]
        for rho, k in enumerate(users, start=1):
            view = tab.view(rho)
            src = cache.part1[d[k - 1] - 1]
            if p.uses_blocks:
                _, rest = block_window(rho, Kh, p.t1)
                topup = src.reshape(Kh, sz.block)[rest].reshape(-1)
            else:
                topup = src.copy()
            key_id = None
            if cache.unicast_key_ids:
                key_id = cache.unicast_key_ids[rho - 1]
                reg.consume(key_id)
                topup = topup ^ cache.unicast_keys[rho - 1]
            rt.messages[k] = RelayMessage(
                relay=j, user=k, rank=rho, width=p.width,
                topup=topup, topup_key=key_id,
                forwarded_labels=tuple(tab.signals[q] for q in view.forwarded),
                forwarded=X[view.forwarded],
            )
        out[j] = rt
    return DeliveryTranscript(p, placement.F, d, out)


def recover_symbol(placement: PlacementResult, message: RelayMessage, demand, k: int) -> np.ndarray:
    """Rebuild encoded symbol f^j_{d_k} from user k's cache and Y_{j,d,k}."""
    p = placement.params
    topo = p.topology
    j = message.relay
    slot = placement.users[k].slots[j]
    sz = p.sizes(placement.F)
    Kh = p.Khat
    tab = tables(Kh, p.t2)
    rho = slot.rank
    view = tab.view(rho)
    if message.user != k or message.rank != rho:
        raise DecodeError(f"message for user {message.user} handed to user {k}")
    expected = tuple(tab.signals[q] for q in view.forwarded)
    if message.forwarded_labels != expected:
        raise DecodeError(f"user {k}: relay {j} forwarded {message.forwarded_labels}, cache expects {expected}")
    if message.forwarded.shape != (len(expected), sz.item):
        raise DecodeError(f"user {k}: relay {j} forwarded payload has shape {message.forwarded.shape}")
    dk = demand[k - 1] - 1
    file_by_rank = np.array([demand[u - 1] - 1 for u in topo.users_of(j)], dtype=np.int64)

    fwd = message.forwarded
    if slot.multicast_key_ids:
        fwd = fwd ^ slot.multicast_keys
    others = file_by_rank[view.other_ranks - 1]
    known = _xor_reduce(slot.items[others, view.other_slots], axis=1)
    full = np.empty((p.share_n, sz.item), dtype=fwd.dtype)
    full[view.cached] = slot.items[dk]
    full[view.target] = fwd ^ known
    part2 = ramp.reconstruct_array(full, p.share_m, p.share_n, p.width)

    topup = message.topup
    if slot.unicast_key_id is not None:
        if message.topup_key != slot.unicast_key_id:
            raise DecodeError(f"user {k}: top-up from relay {j} padded with {message.topup_key}")
        topup = topup ^ slot.unicast_key
    if p.uses_blocks:
        blocks = np.empty((Kh, sz.block), dtype=fwd.dtype)
        cached, rest = block_window(rho, Kh, p.t1)
        if topup.size != len(rest) * sz.block:
            raise DecodeError(f"user {k}: top-up from relay {j} has {topup.size} symbols")
        blocks[cached] = slot.part1_blocks[dk]
        blocks[rest] = topup.reshape(len(rest), sz.block)
        part1 = blocks.reshape(-1)
    else:
        part1 = topup
    if part1.size != sz.part1:
        raise DecodeError(f"user {k}: f^{{{j},1}} rebuilt with {part1.size} symbols, expected {sz.part1}")
    return np.concatenate([part1, part2])


def decode(placement: PlacementResult, messages: dict, demand, k: int) -> BitBuffer:
    """User k's decoder: cache plus one message per connected relay."""
    p = placement.params
    d = check_demand(demand, p.K, p.D)
    relays = p.topology.relays_of(k)
    missing = [j for j in relays if j not in messages]
    if missing:
        raise DecodeError(f"user {k} is missing messages from relays {missing}")
    symbols = {j: recover_symbol(placement, messages[j], d, k) for j in relays}
    return BitBuffer(mds.decode_array(symbols, p.h, p.r, p.width), p.width)


def decode_all(placement: PlacementResult, transcript: DeliveryTranscript) -> dict:
    return {k: decode(placement, transcript.messages_for(k), transcript.demand, k)
            for k in placement.params.topology.users}
