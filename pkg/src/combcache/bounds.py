"""Achievable rates, cut-set lower bounds and memory-sharing envelopes.

Everything is exact: inputs are coerced to ``Fraction`` and no floats appear
in any comparison.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from math import comb, floor

from .params import ParamError, SchemeKind


@dataclass(frozen=True)
class RatePoint:
    kind: SchemeKind
    M: Fraction
    N: Fraction
    R1: Fraction
    R2: Fraction
    t1: int | None = None
    t2: int | None = None

    def __post_init__(self):
        if self.R1 < 0 or self.R2 < 0:
            raise ValueError(f"negative rate in {self}")

    @property
    def t(self) -> int | None:
        return self.t2


def _F(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _check_grid(name: str, value: int, hi: int) -> None:
    if not 0 <= value <= hi:
        raise ParamError(f"grid violation: {name}={value} outside 0..{hi}")


# -- achievable rates on the grid ---------------------------------------------

def memory_baseline(D: int, Khat: int, r: int, N, t1: int, t2: int) -> Fraction:
    return Fraction((t1 - t2) * r, Khat) * _F(N) + Fraction(t2 * D, Khat)


def rate_upper_baseline(D: int, Khat: int, r: int, N, t1: int, t2: int) -> RatePoint:
    N = _F(N)
    if not 0 <= N <= Fraction(D, r):
        raise ParamError(f"relay memory N={N} outside 0..D/r")
    _check_grid("t1", t1, min(Khat, floor(Khat * N / D)))
    _check_grid("t2", t2, Khat)
    M = memory_baseline(D, Khat, r, N, t1, t2)
    R1 = Fraction(Khat - t2, r * (t2 + 1)) * (1 - N * r / D)
    R2 = Fraction(1, r) * (1 - M / D)
    return RatePoint(SchemeKind.BASELINE, M, N, R1, R2, t1, t2)


def memory_secure_delivery(D: int, Khat: int, r: int, N, t1: int, t2: int) -> Fraction:
    # uses D + Khat - t1, the denominator that matches the placed bits
    N = _F(N)
    return (1 + Fraction(t2 * (D - 1), Khat)
            + Fraction((t1 - t2) * r * (D - 1), Khat) * N / (D + Khat - t1))


def rate_upper_secure_delivery(D: int, Khat: int, r: int, N, t1: int, t2: int) -> RatePoint:
    N = _F(N)
    if N < 0:
        raise ParamError(f"relay memory N={N} is negative")
    _check_grid("t1", t1, Khat)
    _check_grid("t2", t2, Khat)
    if Fraction(t1, Khat) > N / (D + Khat - t1):
        raise ParamError(f"grid violation: t1/Khat exceeds N/(D+Khat-t1) at t1={t1}, N={N}")
    if N * r > D + Khat - t1:
        raise ParamError(f"relay part N/(D+Khat-t1) exceeds 1/r at N={N}")
    M = memory_secure_delivery(D, Khat, r, N, t1, t2)
    R1 = Fraction(Khat - t2, r * (t2 + 1)) * (1 - N * r / (D + Khat - t1))
    R2 = Fraction(1, r) * (1 - (M - 1) / (D - 1)) if D > 1 else Fraction(0)
    return RatePoint(SchemeKind.SECURE_DELIVERY, M, N, R1, R2, t1, t2)


def memory_secure_caching(D: int, Khat: int, r: int, N, t: int) -> Fraction:
    return Fraction(t * D, Khat - t) * (1 - _F(N) * r / D)


def t_from_memory_secure_caching(D: int, Khat: int, r: int, N, M) -> Fraction:
    N, M = _F(N), _F(M)
    return Khat * M / (D + M - N * r)


def memory_secure_both(D: int, Khat: int, r: int, N, t: int) -> Fraction:
    return 1 + Fraction(t * D, Khat - t) * (1 - _F(N) * r / (D + Khat))


def t_from_memory_secure_both(D: int, Khat: int, r: int, N, M) -> Fraction:
    """Inverse of ``memory_secure_both`` in t.

    Solving the memory equation gives (D+Khat)(M+D-1) - rND in the
    denominator; the rND term enters with a minus sign.
    """
    N, M = _F(N), _F(M)
    return Khat * (M - 1) * (D + Khat) / ((D + Khat) * (M + D - 1) - r * N * D)


def _resolve_t(kind, D, Khat, r, N, M, t, memory, t_from_memory) -> tuple[int, Fraction]:
    if t is None:
        if M is None:
            raise ParamError("give either M or t")
        tf = t_from_memory(D, Khat, r, N, M)
        if tf.denominator != 1 or not 0 <= tf <= Khat - 1:
            raise ParamError(f"M={M} is off the {kind.value} grid (t={tf}); use envelope()")
        t = int(tf)
    _check_grid("t", t, Khat - 1)
    Mt = memory(D, Khat, r, N, t)
    if M is not None and _F(M) != Mt:
        raise ParamError(f"M={M} is off the {kind.value} grid; t={t} gives M={Mt}")
    return t, Mt


def rate_upper_secure_caching(D: int, Khat: int, r: int, N, M=None, t: int | None = None) -> RatePoint:
    N = _F(N)
    if not 0 <= N <= Fraction(D, r):
        raise ParamError(f"relay memory N={N} outside 0..D/r")
    t, M = _resolve_t(SchemeKind.SECURE_CACHING, D, Khat, r, N, M, t,
                      memory_secure_caching, t_from_memory_secure_caching)
    a = 1 - N * r / D
    denom = r * ((Khat + 1) * M + D - r * N)
    R1 = Khat * (D + M - r * N) / denom * a if denom else Fraction(0)
    return RatePoint(SchemeKind.SECURE_CACHING, M, N, R1, Fraction(1, r), 0, t)


def rate_upper_secure_both(D: int, Khat: int, r: int, N, M=None, t: int | None = None) -> RatePoint:
    N = _F(N)
    if not 0 <= N <= Fraction(D + Khat, r):
        raise ParamError(f"relay memory N={N} outside 0..(D+Khat)/r")
    t, M = _resolve_t(SchemeKind.SECURE_BOTH, D, Khat, r, N, M, t,
                      memory_secure_both, t_from_memory_secure_both)
    a = 1 - N * r / (D + Khat)
    num = Khat * ((D + Khat) * (M + D - 1) - r * N * D)
    den = r * ((D + Khat) * (D + (M - 1) * (Khat + 1)) - r * N * D)
    R1 = num / den * a if den else Fraction(0)
    return RatePoint(SchemeKind.SECURE_BOTH, M, N, R1, Fraction(1, r), 0, t)


def rate_upper(kind, D: int, Khat: int, r: int, N, t1: int = 0, t2: int = 0) -> RatePoint:
    """Grid-point dispatcher in terms of (t1, t2); shared-cache kinds read t2 as t."""
    kind = SchemeKind(kind)
    if kind is SchemeKind.BASELINE:
        return rate_upper_baseline(D, Khat, r, N, t1, t2)
    if kind is SchemeKind.SECURE_DELIVERY:
        return rate_upper_secure_delivery(D, Khat, r, N, t1, t2)
    if t1:
        raise ParamError(f"{kind.value} has no t1 parameter")
    if kind is SchemeKind.SECURE_CACHING:
        return rate_upper_secure_caching(D, Khat, r, N, t=t2)
    return rate_upper_secure_both(D, Khat, r, N, t=t2)


def upper_grid(kind, D: int, Khat: int, r: int, N) -> list[RatePoint]:
    """Every valid grid point of a scheme at relay memory N."""
    kind = SchemeKind(kind)
    out = []
    t1s = range(Khat + 1) if not kind.shared else [0]
    t2s = range(Khat + 1) if not kind.shared else range(Khat)
    for t1 in t1s:
        for t2 in t2s:
            try:
                out.append(rate_upper(kind, D, Khat, r, N, t1, t2))
            except ParamError:
                pass
    return out


# -- closed forms without relay caches ----------------------------------------

def r1_closed_form_no_relay(kind, D: int, Khat: int, r: int, M) -> Fraction:
    """First-hop rate at N = 0 written directly in M."""
    kind = SchemeKind(kind)
    M = _F(M)
    if kind is SchemeKind.BASELINE:
        return Fraction(Khat, r) * (1 - M / D) / (1 + Khat * M / D)
    if kind is SchemeKind.SECURE_DELIVERY:
        g = (M - 1) / (D - 1)
        return Khat * (1 - g) / (r * (Khat * g + 1))
    if kind is SchemeKind.SECURE_CACHING:
        return Khat * (D + M) / (r * ((Khat + 1) * M + D))
    return Khat * (D + M - 1) / (r * ((Khat + 1) * (M - 1) + D))


def three_factors(D: int, Khat: int, r: int, M) -> tuple[Fraction, Fraction, Fraction]:
    """(per-relay share, local gain, global gain) whose product is the N=0 baseline R1."""
    M = _F(M)
    return Fraction(Khat, r), 1 - M / D, 1 / (1 + Khat * M / D)


# -- cut-set lower bounds -----------------------------------------------------

def _cut_term(users: int, relays: int, D: int, M: Fraction, N: Fraction) -> Fraction:
    rounds = D // users
    return Fraction(1, relays) * (users - (users * M + relays * N) / rounds)


def rate_lower_R1(h: int, r: int, D: int, K: int, M, N) -> Fraction:
    """Largest cut-set bound on R1 over both cut families, clamped at 0."""
    M, N = _F(M), _F(N)
    best = Fraction(0)
    for l in range(r, h + 1):
        for s in range(1, min(D, comb(l, r)) + 1):
            best = max(best, _cut_term(s, l, D, M, N))
    for x in range(1, min(D, K) + 1):
        best = max(best, _cut_term(x, min(x + r - 1, h), D, M, N))
    return best


def rate_lower_R2(r: int, D: int, M) -> Fraction:
    return max(Fraction(0), Fraction(1, r) * (1 - _F(M) / D))


# -- memory sharing -----------------------------------------------------------

def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def lower_hull(pairs) -> list[tuple[Fraction, Fraction]]:
    """Vertices of the lower convex hull of (x, y) pairs, left to right."""
    best: dict = {}
    for x, y in pairs:
        x, y = _F(x), _F(y)
        if x not in best or y < best[x]:
            best[x] = y
    pts = sorted(best.items())
    hull: list = []
    for p in pts:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) <= 0:
            hull.pop()
        hull.append(p)
    return hull


def hull_value(hull, x) -> Fraction:
    x = _F(x)
    if not hull or x < hull[0][0] or x > hull[-1][0]:
        raise ValueError(f"M={x} outside the envelope range")
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        if x0 <= x <= x1:
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    return hull[0][1]


def envelope(points: list[RatePoint], M_query) -> RatePoint:
    """Memory-sharing envelope, taken per rate component."""
    if not points:
        raise ValueError("envelope of an empty point set")
    M_query = _F(M_query)
    for p in points:
        if p.M == M_query and all(q.R1 >= p.R1 and q.R2 >= p.R2 for q in points if q.M == M_query):
            exact = p
            break
    else:
        exact = None
    R1 = hull_value(lower_hull((p.M, p.R1) for p in points), M_query)
    R2 = hull_value(lower_hull((p.M, p.R2) for p in points), M_query)
    base = points[0]
    if exact is not None and exact.R1 == R1 and exact.R2 == R2:
        return exact
    return replace(base, M=M_query, R1=R1, R2=R2, t1=None, t2=None)


def achievable(kind, D: int, Khat: int, r: int, N, M) -> RatePoint:
    """Envelope of a scheme's grid at relay memory N, evaluated at M."""
    return envelope(upper_grid(kind, D, Khat, r, N), M)
