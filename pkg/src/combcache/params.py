"""Scheme parameters: grid validation, derived memory M, and segment sizes.

Every size is tracked as an exact fraction of the file size F.  ``F_min`` is
the smallest F at which all non-empty segments are whole field symbols.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb, floor, gcd, lcm

from .coding.mds import mds_feasible
from .coding.ramp import ramp_feasible
from .topology import Topology


class ParamError(ValueError):
    """Parameters outside a scheme's valid grid."""


class SchemeKind(str, Enum):
    BASELINE = "baseline"
    SECURE_DELIVERY = "secure_delivery"
    SECURE_CACHING = "secure_caching"
    SECURE_BOTH = "secure_both"

    def __str__(self):
        return self.value

    @property
    def keyed(self) -> bool:
        return self in (SchemeKind.SECURE_DELIVERY, SchemeKind.SECURE_BOTH)

    @property
    def shared(self) -> bool:
        return self in (SchemeKind.SECURE_CACHING, SchemeKind.SECURE_BOTH)


@dataclass(frozen=True)
class Sizes:
    """Segment lengths in symbols for a concrete file size."""

    F: int
    width: int
    symbol: int
    part1: int
    part2: int
    item: int
    block: int
    topup: int
    unicast_key: int

    def bits(self, n_symbols: int) -> int:
        return n_symbols * self.width


@dataclass(frozen=True)
class SchemeParams:
    kind: SchemeKind
    topology: Topology
    D: int
    N: Fraction
    t1: int
    t2: int
    M: Fraction
    width: int
    part1: Fraction       # |f^{i,1}| / F
    item: Fraction        # piece or share size / F
    block: Fraction       # one of Khat blocks of f^{i,1} (piece schemes)
    unicast_key: Fraction
    share_m: int          # ramp threshold; 0 means plain fragmentation
    share_n: int          # pieces/shares per f^{i,2}
    F_min: int

    @property
    def t(self) -> int:
        return self.t2

    @property
    def h(self) -> int:
        return self.topology.h

    @property
    def r(self) -> int:
        return self.topology.r

    @property
    def K(self) -> int:
        return self.topology.K

    @property
    def Khat(self) -> int:
        return self.topology.Khat

    @property
    def part2(self) -> Fraction:
        return Fraction(1, self.r) - self.part1

    @property
    def uses_blocks(self) -> bool:
        """Users cache t1 of the Khat blocks of every f^{j,1}."""
        return not self.kind.shared

    @property
    def topup(self) -> Fraction:
        """Bits of f^{j,1}_{d_k} each relay sends each user, over F."""
        if self.uses_blocks:
            return self.block * (self.Khat - self.t1)
        return self.part1

    @property
    def n_signals(self) -> int:
        return comb(self.Khat, self.t2 + 1)

    def sizes(self, F: int | None = None) -> Sizes:
        F = self.F_min if F is None else F
        if F <= 0 or F % self.F_min:
            raise ParamError(f"F={F} is not a positive multiple of F_min={self.F_min}")
        w = self.width

        def sym(frac: Fraction) -> int:
            bits = frac * F
            assert bits.denominator == 1 and bits.numerator % w == 0, (frac, F)
            return bits.numerator // w

        return Sizes(F, w, sym(Fraction(1, self.r)), sym(self.part1), sym(self.part2),
                     sym(self.item), sym(self.block), sym(self.topup), sym(self.unicast_key))

    def describe(self) -> dict:
        return {
            "kind": self.kind.value, "h": self.h, "r": self.r, "K": self.K, "Khat": self.Khat,
            "D": self.D, "N": str(self.N), "t1": self.t1, "t2": self.t2, "M": str(self.M),
            "width": self.width, "F_min": self.F_min,
            "share_m": self.share_m, "share_n": self.share_n,
        }


def _granularity(frac: Fraction, width: int) -> int:
    if frac == 0:
        return 1
    return frac.denominator * width // gcd(frac.numerator, width)


def _choose_width(h: int, r: int, m: int, n: int, width: int | None) -> int:
    candidates = [width] if width is not None else [8, 16]
    for w in candidates:
        if mds_feasible(h, r, w) and ramp_feasible(m, n, w):
            return w
    raise ParamError(f"no supported field of width {candidates} fits ({h},{r}) MDS and ({m},{n}) sharing")


def _common(topology: Topology, D: int, N) -> Fraction:
    N = Fraction(N)
    if D < topology.K:
        raise ParamError(f"need K <= D, got K={topology.K}, D={D}")
    if N < 0:
        raise ParamError(f"relay memory N={N} is negative")
    return N


def _finish(kind, topology, D, N, t1, t2, M, part1, m, n, block, unicast_key, width) -> SchemeParams:
    r = topology.r
    width = _choose_width(topology.h, r, m, n, width)
    part2 = Fraction(1, r) - part1
    if part2 < 0:
        raise ParamError(f"relay share {part1} of each file exceeds 1/r")
    item = part2 / (n - m)
    fracs = [Fraction(1, r), part1, part2, item, unicast_key]
    if kind in (SchemeKind.BASELINE, SchemeKind.SECURE_DELIVERY):
        fracs.append(block)
    F_min = 1
    for f in fracs:
        F_min = lcm(F_min, _granularity(f, width))
    return SchemeParams(kind, topology, D, N, t1, t2, M, width, part1, item, block, unicast_key, m, n, F_min)


def params_baseline(topology: Topology, D: int, N, t1: int, t2: int, width: int | None = None) -> SchemeParams:
    N = _common(topology, D, N)
    Kh, r = topology.Khat, topology.r
    if N > Fraction(D, r):
        raise ParamError(f"relay memory N={N} exceeds D/r={Fraction(D, r)}")
    t1_max = min(Kh, floor(Kh * N / D))
    if not 0 <= t1 <= t1_max:
        raise ParamError(f"grid violation: t1={t1} outside 0..{t1_max} (min(Khat, floor(Khat*N/D)))")
    if not 0 <= t2 <= Kh:
        raise ParamError(f"grid violation: t2={t2} outside 0..Khat={Kh}")
    M = Fraction((t1 - t2) * r, Kh) * N + Fraction(t2 * D, Kh)
    part1 = N / D
    return _finish(SchemeKind.BASELINE, topology, D, N, t1, t2, M, part1, 0, comb(Kh, t2),
                   part1 / Kh, Fraction(0), width)


def params_secure_delivery(topology: Topology, D: int, N, t1: int, t2: int,
                           width: int | None = None) -> SchemeParams:
    N = _common(topology, D, N)
    Kh, r = topology.Khat, topology.r
    if not 0 <= t1 <= Kh:
        raise ParamError(f"grid violation: t1={t1} outside 0..Khat={Kh}")
    if not 0 <= t2 <= Kh:
        raise ParamError(f"grid violation: t2={t2} outside 0..Khat={Kh}")
    denom = D + Kh - t1
    if Fraction(t1, Kh) > N / denom:
        raise ParamError(f"grid violation: t1/Khat={Fraction(t1, Kh)} exceeds N/(D+Khat-t1)={N / denom}")
    part1 = N / denom
    # memory actually accumulated by the placement; see decisions on the N+Khat-t1 form
    M = 1 + Fraction(t2 * (D - 1), Kh) + Fraction((t1 - t2) * r * (D - 1), Kh) * part1
    block = part1 / Kh
    return _finish(SchemeKind.SECURE_DELIVERY, topology, D, N, t1, t2, M, part1, 0, comb(Kh, t2),
                   block, block * (Kh - t1), width)


def params_secure_caching(topology: Topology, D: int, N, t: int, width: int | None = None) -> SchemeParams:
    N = _common(topology, D, N)
    Kh, r = topology.Khat, topology.r
    if N > Fraction(D, r):
        raise ParamError(f"relay memory N={N} exceeds D/r={Fraction(D, r)}")
    if not 0 <= t <= Kh - 1:
        raise ParamError(f"grid violation: t={t} outside 0..Khat-1={Kh - 1}")
    M = Fraction(t * D, Kh - t) * (1 - N * r / D)
    m = comb(Kh - 1, t - 1) if t else 0
    return _finish(SchemeKind.SECURE_CACHING, topology, D, N, 0, t, M, N / D, m, comb(Kh, t),
                   Fraction(0), Fraction(0), width)


def params_secure_both(topology: Topology, D: int, N, t: int, width: int | None = None) -> SchemeParams:
    N = _common(topology, D, N)
    Kh, r = topology.Khat, topology.r
    if N > Fraction(D + Kh, r):
        raise ParamError(f"relay memory N={N} exceeds (D+Khat)/r={Fraction(D + Kh, r)}")
    if not 0 <= t <= Kh - 1:
        raise ParamError(f"grid violation: t={t} outside 0..Khat-1={Kh - 1}")
    part1 = N / (D + Kh)
    M = 1 + Fraction(t * D, Kh - t) * (1 - r * part1)
    m = comb(Kh - 1, t - 1) if t else 0
    return _finish(SchemeKind.SECURE_BOTH, topology, D, N, 0, t, M, part1, m, comb(Kh, t),
                   Fraction(0), part1, width)


def make_params(kind, topology: Topology, D: int, N=0, t1: int = 0, t2: int | None = None,
                width: int | None = None) -> SchemeParams:
    kind = SchemeKind(kind)
    if t2 is None:
        raise ParamError("grid parameter t2 (or t) is required")
    if kind is SchemeKind.BASELINE:
        return params_baseline(topology, D, N, t1, t2, width)
    if kind is SchemeKind.SECURE_DELIVERY:
        return params_secure_delivery(topology, D, N, t1, t2, width)
    if t1:
        raise ParamError(f"{kind.value} has no t1 parameter")
    if kind is SchemeKind.SECURE_CACHING:
        return params_secure_caching(topology, D, N, t2, width)
    return params_secure_both(topology, D, N, t2, width)


def grid(kind, topology: Topology, D: int, N=0) -> list[tuple[int, int]]:
    """All valid (t1, t2) pairs of a scheme at the given N."""
    kind = SchemeKind(kind)
    out = []
    Kh = topology.Khat
    t1s = range(Kh + 1) if not kind.shared else [0]
    t2s = range(Kh + 1) if not kind.shared else range(Kh)
    for t1 in t1s:
        for t2 in t2s:
            try:
                make_params(kind, topology, D, N, t1, t2)
            except ParamError:
                continue
            out.append((t1, t2))
    return out
