"""End-to-end experiment runner."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..bounds import RatePoint, rate_lower_R1, rate_lower_R2, rate_upper, upper_grid
from ..coding import mds
from ..coding.randomness import make_rng
from ..engine import decode_all, deliver, place, recover_symbol
from ..model import Library, PlacementResult
from ..params import ParamError, SchemeKind, SchemeParams, make_params
from ..serialize import dump_placement, dump_transcript, write_jsonl
from ..topology import Topology, build_topology
from .audits import AuditReport, audit_secure_caching, audit_secure_delivery
from .config import ExperimentConfig
from .fmt import render_decimal


@dataclass
class RateReport:
    config: dict
    params: dict
    F: int
    seed: int
    demands_checked: int
    server_bits: int | None
    relay_bits: int | None
    R1: Fraction | None
    R2: Fraction | None
    theory: RatePoint | None
    lower_R1: Fraction | None
    lower_R2: Fraction | None
    decode_verified: bool = False
    memory_verified: bool = False
    rates_match: bool = False
    audits: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return (self.decode_verified and self.memory_verified and self.rates_match
                and not self.failures and all(a.passed for a in self.audits))

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def lines(self) -> list[str]:
        p = self.params
        out = [
            f"scheme={p['kind']} h={p['h']} r={p['r']} D={p['D']} N={p['N']} t1={p['t1']} t2={p['t2']} "
            f"M={p['M']} F={self.F} seed={self.seed}",
            f"measured R1={_show(self.R1)} R2={_show(self.R2)} "
            f"(server {self.server_bits} bits/relay, relay {self.relay_bits} bits/user)",
        ]
        if self.theory is not None:
            out.append(f"theory   R1={_show(self.theory.R1)} R2={_show(self.theory.R2)}  "
                       f"lower R1>={_show(self.lower_R1)} R2>={_show(self.lower_R2)}")
        out.append(f"decode={_flag(self.decode_verified)} memory={_flag(self.memory_verified)} "
                   f"rates={_flag(self.rates_match)} demands={self.demands_checked} time={self.wall_time:.3f}s")
        for a in self.audits:
            out += a.lines()
        out += [f"failure: {f}" for f in self.failures]
        out.append(self.status)
        return out


def _show(x) -> str:
    if x is None:
        return "-"
    return f"{render_decimal(x)} ({x})"


def _flag(b: bool) -> str:
    return "ok" if b else "FAIL"


def resolve_seed(seed) -> int:
    if seed == "random":
        return int(np.random.SeedSequence().entropy)
    return int(seed)


def best_grid_point(kind, topology: Topology, D: int, N, M) -> tuple[int, int]:
    """Grid point with the lowest (R1, R2) among those fitting memory budget M."""
    kind = SchemeKind(kind)
    M = Fraction(M)
    fits = [p for p in upper_grid(kind, D, topology.Khat, topology.r, N) if p.M <= M]
    if not fits:
        raise ParamError(f"grid violation: no {kind.value} grid point fits M={M} at N={N}")
    best = min(fits, key=lambda p: (p.R1, p.R2, p.M))
    return best.t1, best.t2


def params_for(config: ExperimentConfig) -> SchemeParams:
    topo = build_topology(config.h, config.r)
    t1, t2 = config.t1, config.t2
    if t2 is None:
        t1, t2 = best_grid_point(config.scheme, topo, config.D, config.N, config.M)
    p = make_params(config.scheme, topo, config.D, config.N, t1, t2, config.width)
    if config.M is not None and p.M > config.M:
        raise ParamError(f"grid point (t1={t1}, t2={t2}) needs M={p.M}, budget is M={config.M}")
    return p


def demand_list(config: ExperimentConfig, K: int, rng) -> list[tuple]:
    D = config.D
    if config.demand == "distinct":
        out = [tuple((k - 1) % D + 1 for k in range(1, K + 1))]
    elif config.demand == "explicit":
        out = list(config.demands)
    else:
        out = []
    extra = config.n_random or (1 if config.demand == "random" else 0)
    out += [tuple(int(x) for x in rng.integers(1, D + 1, K)) for _ in range(extra)]
    return out


def diagnose(placement: PlacementResult, library: Library, transcript, k: int) -> str:
    """Name the first encoded symbol user k rebuilt wrongly."""
    p = placement.params
    n = transcript.demand[k - 1]
    enc = mds.encode_array(library.files[n - 1], p.h, p.r, p.width)
    for j, msg in sorted(transcript.messages_for(k).items()):
        try:
            got = recover_symbol(placement, msg, transcript.demand, k)
        except Exception as exc:            # decoder rejected the message itself
            return f"user {k}: {exc}"
        if not np.array_equal(got, enc[j - 1]):
            return f"user {k} rebuilt f^{{{j}}}_{{{n}}} incorrectly"
    return f"user {k} decoded W_{n} incorrectly"


def _memory_failure(placement: PlacementResult) -> str | None:
    rep = placement.memory_report()
    for j, b in rep["relay_bits"].items():
        if b != rep["relay_target"]:
            return f"relay {j} caches {b} bits, N*F = {rep['relay_target']}"
    for k, b in rep["user_bits"].items():
        if b != rep["user_target"]:
            return f"user {k} caches {b} bits, M*F = {rep['user_target']}"
    return None


def run_experiment(config: ExperimentConfig) -> RateReport:
    """Place, deliver and decode for every configured demand, then compare.

    Keyed schemes spend their keys in one delivery, so they get a fresh
    placement for each demand.  Raises ``ConfigError`` or ``ParamError`` for
    invalid configs; decode and memory failures end the run early and are
    reported in ``failures``.
    """
    t0 = time.perf_counter()
    config.validate()
    params = params_for(config)
    topo = params.topology
    seed = resolve_seed(config.seed)
    F = params.F_min * config.F_multiplier
    root = np.random.SeedSequence(seed)
    lib_seq, demand_seq, place_seq = root.spawn(3)
    library = Library.random(params.D, F, params.width, make_rng(lib_seq))
    demands = demand_list(config, params.K, make_rng(demand_seq))
    place_rngs = [make_rng(s) for s in place_seq.spawn(len(demands))]

    theory = rate_upper(params.kind, params.D, params.Khat, params.r, params.N, params.t1, params.t2)
    rep = RateReport(config.to_dict(), params.describe(), F, seed, 0, None, None, None, None, theory,
                     rate_lower_R1(params.h, params.r, params.D, params.K, params.M, params.N),
                     rate_lower_R2(params.r, params.D, params.M))
    placement = None
    rates = set()
    decode_ok = memory_ok = True
    transcript = None
    for i, d in enumerate(demands):
        if placement is None or params.kind.keyed:
            placement = place(library, topo, params, place_rngs[i])
            bad = _memory_failure(placement)
            if bad:
                rep.failures.append(bad)
                memory_ok = False
                break
        transcript = deliver(placement, d)
        try:
            decoded = decode_all(placement, transcript)
        except Exception as exc:
            rep.failures.append(f"demand {d}: {exc}")
            decode_ok = False
            break
        wrong = [k for k, b in decoded.items() if b != library.file(d[k - 1])]
        if wrong:
            rep.failures.append(f"demand {d}: " + diagnose(placement, library, transcript, wrong[0]))
            decode_ok = False
            break
        if not transcript.symmetric():
            rep.failures.append(f"demand {d}: link loads are not symmetric")
            break
        rates.add(transcript.rates())
        rep.demands_checked += 1
        if i == 0:
            rep.server_bits = next(iter(transcript.server_loads().values()))
            rep.relay_bits = next(iter(transcript.relay_loads().values()))

    rep.decode_verified = decode_ok and rep.demands_checked == len(demands)
    rep.memory_verified = memory_ok and placement is not None
    if rates:
        rep.R1, rep.R2 = next(iter(rates))
        rep.rates_match = rates == {(theory.R1, theory.R2)}
        if not rep.rates_match:
            rep.failures.append(f"measured rates {sorted(rates)} differ from theory ({theory.R1}, {theory.R2})")

    if config.audit and rep.decode_verified:
        rep.audits += run_audits(params, F, placement, transcript, seed)
    if config.dump and placement is not None:
        write_jsonl(dump_placement(placement) + dump_transcript(transcript), config.dump)
    rep.wall_time = time.perf_counter() - t0
    return rep


def run_audits(params: SchemeParams, F: int, placement, transcript, seed: int) -> list[AuditReport]:
    out = []
    if params.kind.keyed:
        out.append(audit_secure_delivery(transcript, placement.registry))
    if params.kind.shared:
        out.append(audit_secure_caching(params, F, seed=seed))
    return out
