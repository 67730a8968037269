"""Security audits.

Structural checks run at any scale: one-time-pad coverage of every delivery
payload, single use of every key, and the share count each user can assemble
per file.

Exhaustive checks run on tiny instances.  Placement and delivery are
GF(2)-linear in (library bits, random bits), so the audit first learns the
affine map of the real pipeline from basis-vector runs, confirms it on random
inputs, and then enumerates every library and every random string through the
map.  Every enumerated case is therefore a faithful pipeline output without
paying for 2^n full runs.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from ..coding.bits import bits_to_symbols, symbols_to_bits
from ..coding.otp import KeyRegistry, format_key_id
from ..coding.randomness import CountingRandomness, ScriptedRandomness, make_rng
from ..engine import deliver, place
from ..model import DeliveryTranscript, Library, PlacementResult
from ..params import SchemeParams
from ..subsets import label

MAX_ENUM_BITS = 24          # hard cap on library + randomness bits
DEFAULT_ENUM_BITS = 22
MAX_VIEW_BITS = 63


class AuditTooLarge(ValueError):
    pass


@dataclass
class Check:
    name: str
    status: str             # PASS, FAIL or N/A
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "PASS"


@dataclass
class AuditReport:
    name: str
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        applicable = [c for c in self.checks if c.status != "N/A"]
        return bool(applicable) and all(c.passed for c in applicable)

    @property
    def first_failure(self) -> str | None:
        for c in self.checks:
            if c.status == "FAIL":
                return f"{c.name}: {c.detail}"
        return None

    def check(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)

    def lines(self) -> list[str]:
        return [f"{self.name}.{c.name}: {c.status}" + (f" ({c.detail})" if c.detail else "")
                for c in self.checks]


# -- structural checks ------------------------------------------------------

def check_otp_coverage(transcript: DeliveryTranscript, registry: KeyRegistry | None) -> Check:
    """Every non-empty payload carries its own full-length, once-used key."""
    w = transcript.params.width
    seen: Counter = Counter()

    def unit(name, kid, data):
        if data.size == 0:
            return None
        if kid is None:
            return f"unpadded bits in {name}"
        if registry is None or kid not in registry:
            return f"{name} padded with unregistered key {format_key_id(kid)}"
        if registry.get(kid).length_bits != data.size * w:
            return f"{name} is {data.size * w} bits, key {format_key_id(kid)} is {registry.get(kid).length_bits}"
        seen[kid] += 1
        return None

    for j, rt in sorted(transcript.relays.items()):
        pos = {S: q for q, S in enumerate(rt.signal_labels)}
        for S, kid, x in zip(rt.signal_labels, rt.signal_keys, rt.signals):
            err = unit(f"X^{{{label(S)}}}_{{{j}}}", kid, x)
            if err:
                return Check("otp_coverage", "FAIL", err)
        for k, m in sorted(rt.messages.items()):
            err = unit(f"Y_{{{j},{k}}} top-up", m.topup_key, m.topup)
            if err:
                return Check("otp_coverage", "FAIL", err)
            for S, x in zip(m.forwarded_labels, m.forwarded):
                if S not in pos or not np.array_equal(x, rt.signals[pos[S]]):
                    return Check("otp_coverage", "FAIL",
                                 f"Y_{{{j},{k}}} forwards X^{{{label(S)}}} that differs from the server signal")
    for kid, n in seen.items():
        if n > 1 or registry.uses(kid) != 1:
            return Check("otp_coverage", "FAIL",
                         f"key {format_key_id(kid)} covers {n} payloads, registry shows {registry.uses(kid)} uses")
    return Check("otp_coverage", "PASS", f"{len(seen)} keys, each used once")


def held_shares(placement: PlacementResult, transcript: DeliveryTranscript, k: int) -> dict:
    """(relay, file) -> set of item labels user k holds after delivery.

    A forwarded signal reveals an item only when exactly one of its XOR
    terms is missing from the cache.
    """
    p = placement.params
    d = transcript.demand
    out = {}
    for j, slot in placement.users[k].slots.items():
        cached = set(slot.item_labels)
        held = {n: set(cached) for n in range(1, p.D + 1)}
        users = p.topology.users_of(j)
        for S in transcript.relays[j].messages[k].forwarded_labels:
            terms = [(d[users[rho - 1] - 1], tuple(x for x in S if x != rho)) for rho in S]
            unknown = [(n, T) for n, T in terms if T not in held[n]]
            if len(unknown) == 1:
                n, T = unknown[0]
                held[n].add(T)
        for n, labels in held.items():
            out[(j, n)] = labels
    return out


def check_share_count(placement: PlacementResult, transcript: DeliveryTranscript) -> Check:
    p = placement.params
    if not p.kind.shared:
        return Check("share_count", "N/A", f"{p.kind.value} caches pieces, not shares")
    worst = 0
    for k in p.topology.users:
        dk = transcript.demand[k - 1]
        for (j, n), labels in held_shares(placement, transcript, k).items():
            if n == dk:
                if len(labels) != p.share_n:
                    return Check("share_count", "FAIL",
                                 f"user {k} holds {len(labels)} of {p.share_n} shares of S^{j}_{n}")
            else:
                worst = max(worst, len(labels))
                if len(labels) > p.share_m:
                    return Check("share_count", "FAIL",
                                 f"user {k} holds {len(labels)} > m={p.share_m} shares of foreign S^{j}_{n}")
    return Check("share_count", "PASS", f"max {worst} foreign shares per symbol, threshold m={p.share_m}")


# -- affine model of the pipeline -------------------------------------------

def user_view(placement: PlacementResult, transcript: DeliveryTranscript, k: int) -> np.ndarray:
    """Bits of Z_k followed by every message user k receives."""
    w = placement.params.width
    parts = []
    for j, s in sorted(placement.users[k].slots.items()):
        parts += [s.part1_blocks, s.items, s.multicast_keys]
        if s.unicast_key is not None:
            parts.append(s.unicast_key)
    for j, m in sorted(transcript.messages_for(k).items()):
        parts += [m.topup, m.forwarded]
    return symbols_to_bits(np.concatenate([a.reshape(-1) for a in parts]), w)


def random_bits_used(params: SchemeParams, F: int) -> int:
    w = params.width
    lib = Library(np.zeros((params.D, F // w), dtype=np.uint8 if w <= 8 else np.uint16), w)
    rng = CountingRandomness()
    place(lib, params.topology, params, rng)
    return rng.used


@dataclass
class AffineMap:
    """out(x) = XOR of columns[i] over set bits i of x, XOR offset (packed ints)."""

    n_library: int
    n_random: int
    columns: dict            # output name -> list of packed ints, one per input bit
    offset: dict             # output name -> packed int
    lengths: dict

    def table(self, name: str, lo: int, hi: int) -> np.ndarray:
        """Output for every assignment of input bits lo..hi-1 (others zero)."""
        t = np.zeros(1, dtype=np.int64)
        for c in self.columns[name][lo:hi]:
            t = np.concatenate([t, t ^ c])
        return t


def _pack(bits: np.ndarray) -> int:
    if bits.size > MAX_VIEW_BITS:
        raise AuditTooLarge(f"view of {bits.size} bits exceeds {MAX_VIEW_BITS}")
    v = 0
    for b in bits:
        v = (v << 1) | int(b)
    return v


def _outputs(params: SchemeParams, F: int, demand, x: np.ndarray, n_library: int) -> dict:
    w = params.width
    lib = Library(bits_to_symbols(x[:n_library], w).reshape(params.D, F // w), w)
    rng = ScriptedRandomness(x[n_library:])
    pl = place(lib, params.topology, params, rng)
    if rng.remaining:
        raise RuntimeError("placement left scripted randomness unused")
    tr = deliver(pl, demand)
    out = {"eavesdropper": tr.eavesdropper_view()}
    for k in params.topology.users:
        out[k] = user_view(pl, tr, k)
    return {name: _pack(b) for name, b in out.items()}, {name: b.size for name, b in out.items()}


def affine_map(params: SchemeParams, F: int, demand, *, samples: int = 16, seed: int = 0,
               max_bits: int = DEFAULT_ENUM_BITS) -> AffineMap:
    n_lib = params.D * F
    n_rand = random_bits_used(params, F)
    n = n_lib + n_rand
    if n > min(max_bits, MAX_ENUM_BITS):
        raise AuditTooLarge(f"{n} library + randomness bits exceeds the cap of {min(max_bits, MAX_ENUM_BITS)}")
    zero = np.zeros(n, dtype=np.uint8)
    offset, lengths = _outputs(params, F, demand, zero, n_lib)
    columns = {name: [] for name in offset}
    for i in range(n):
        e = zero.copy()
        e[i] = 1
        out, _ = _outputs(params, F, demand, e, n_lib)
        for name in offset:
            columns[name].append(out[name] ^ offset[name])
    amap = AffineMap(n_lib, n_rand, columns, offset, lengths)
    rng = make_rng(seed)
    for _ in range(samples):
        x = rng.integers(0, 2, n, dtype=np.uint8)
        out, _ = _outputs(params, F, demand, x, n_lib)
        for name, v in out.items():
            pred = offset[name]
            for i in np.flatnonzero(x):
                pred ^= columns[name][i]
            if pred != v:
                raise RuntimeError(f"pipeline output {name!r} is not affine in its inputs")
    return amap


def _demands(params: SchemeParams, demands, max_demands: int):
    if demands is not None:
        return [tuple(d) for d in demands]
    total = params.D ** params.K
    if total > max_demands:
        raise AuditTooLarge(f"{total} demand vectors exceed the cap of {max_demands}")
    return list(product(range(1, params.D + 1), repeat=params.K))


def _view_grid(amap: AffineMap, name: str) -> np.ndarray:
    """(library, randomness) -> packed view, as a 2-D array."""
    nl, nr = amap.n_library, amap.n_random
    vl = amap.table(name, 0, nl) ^ amap.offset[name]
    vr = amap.table(name, nl, nl + nr)
    return vl[:, None] ^ vr[None, :]


# -- exhaustive checks ------------------------------------------------------

def exhaustive_distribution(params: SchemeParams, F: int, demands=None, *, max_bits: int = DEFAULT_ENUM_BITS,
                            max_demands: int = 64) -> Check:
    """Eavesdropper transcript distribution is the same for every library."""
    ds = _demands(params, demands, max_demands)
    for d in ds:
        amap = affine_map(params, F, d, max_bits=max_bits)
        grid = np.sort(_view_grid(amap, "eavesdropper"), axis=1)
        diff = np.flatnonzero((grid != grid[0]).any(axis=1))
        if diff.size:
            return Check("transcript_distribution", "FAIL",
                         f"demand {d}: libraries #0 and #{int(diff[0])} give different transcript distributions")
    return Check("transcript_distribution", "PASS",
                 f"{len(ds)} demands x {1 << amap.n_library} libraries x {1 << amap.n_random} random strings")


def _uniform_given_view(ids: np.ndarray, nv: int, values: np.ndarray, nvalues: int) -> bool:
    counts = np.bincount((ids * nvalues + values).ravel(), minlength=nv * nvalues).reshape(nv, nvalues)
    return bool((counts == counts[:, :1]).all())


def exhaustive_posterior(params: SchemeParams, F: int, demands=None, *, max_bits: int = DEFAULT_ENUM_BITS,
                         max_demands: int = 64) -> Check:
    """Each user's posterior over every foreign file, alone and jointly, is uniform."""
    ds = _demands(params, demands, max_demands)
    D = params.D
    mask = (1 << F) - 1
    for d in ds:
        amap = affine_map(params, F, d, max_bits=max_bits)
        lib_idx = np.arange(1 << amap.n_library, dtype=np.int64)
        for k in params.topology.users:
            grid = _view_grid(amap, k)
            uniq, ids = np.unique(grid, return_inverse=True)
            ids = ids.reshape(grid.shape)
            foreign = [n for n in range(1, D + 1) if n != d[k - 1]]
            joint = np.zeros_like(lib_idx)
            for n in foreign:
                # input bit i is index bit i; file n occupies bits (n-1)F..nF-1
                wn = (lib_idx >> ((n - 1) * F)) & mask
                joint = (joint << F) | wn
                if not _uniform_given_view(ids, uniq.size, np.broadcast_to(wn[:, None], grid.shape), 1 << F):
                    return Check("posterior_uniform", "FAIL", f"user {k}, demand {d}: posterior of W_{n} not uniform")
            if foreign and not _uniform_given_view(ids, uniq.size, np.broadcast_to(joint[:, None], grid.shape),
                                                   1 << (F * len(foreign))):
                return Check("posterior_uniform", "FAIL",
                             f"user {k}, demand {d}: joint posterior of foreign files not uniform")
    return Check("posterior_uniform", "PASS",
                 f"{len(ds)} demands x {params.K} users, {amap.n_library}+{amap.n_random} input bits enumerated")


# -- audit entry points -----------------------------------------------------

def _tiny(params: SchemeParams, F: int, max_bits: int) -> bool:
    try:
        return params.D * F + random_bits_used(params, F) <= min(max_bits, MAX_ENUM_BITS)
    except Exception:
        return False


def audit_secure_delivery(transcript: DeliveryTranscript, key_registry: KeyRegistry | None,
                          exhaustive="auto", demands=None, max_bits: int = DEFAULT_ENUM_BITS) -> AuditReport:
    rep = AuditReport("secure_delivery", [check_otp_coverage(transcript, key_registry)])
    p, F = transcript.params, transcript.F
    run = _tiny(p, F, max_bits) if exhaustive == "auto" else bool(exhaustive)
    if run:
        rep.checks.append(exhaustive_distribution(p, F, demands, max_bits=max_bits))
    else:
        rep.checks.append(Check("transcript_distribution", "N/A", "instance too large to enumerate"))
    return rep


def audit_secure_caching(params: SchemeParams, F: int | None = None, *, seed: int = 0, demands=None,
                         exhaustive="auto", n_structural: int = 8,
                         max_bits: int = DEFAULT_ENUM_BITS) -> AuditReport:
    """Share-count check on seeded runs, plus the posterior enumeration when tiny."""
    F = params.F_min if F is None else F
    rng = make_rng(seed)
    lib = Library.random(params.D, F, params.width, rng)
    if demands is not None:
        sample = [tuple(x) for x in demands]
    else:
        sample = [tuple((k - 1) % params.D + 1 for k in params.topology.users)]
        sample += [tuple(int(x) for x in rng.integers(1, params.D + 1, params.K)) for _ in range(n_structural - 1)]
    share = None
    for d in sample:
        pl = place(lib, params.topology, params, rng)
        share = check_share_count(pl, deliver(pl, d))
        if share.status != "PASS":
            break
    rep = AuditReport("secure_caching", [share])
    run = _tiny(params, F, max_bits) if exhaustive == "auto" else bool(exhaustive)
    if run:
        rep.checks.append(exhaustive_posterior(params, F, demands, max_bits=max_bits))
    else:
        rep.checks.append(Check("posterior_uniform", "N/A", "instance too large to enumerate"))
    return rep
