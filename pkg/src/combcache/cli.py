"""Command-line front end: ``combcache {simulate,bounds,sweep,audit}``.

Exit codes: 0 when everything passes, 1 when any check fails, 2 for usage
or configuration errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .bounds import achievable, rate_lower_R1, rate_lower_R2, rate_upper
from .harness import (ConfigError, ExperimentConfig, audit_secure_caching, audit_secure_delivery,
                      config_from_mapping, emit_plot_data, load_config, render_decimal, run_experiment,
                      sweep)
from .harness.audits import AuditTooLarge
from .harness.runner import params_for
from .engine import deliver, place
from .model import Library
from .coding.randomness import make_rng
from .params import ParamError, SchemeKind
from .topology import TopologyError, build_topology

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _fraction(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}")


def _seed(s: str):
    if s == "random":
        return s
    try:
        return int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer or 'random', got {s!r}")


def _demands(s: str) -> list:
    """Demand vectors as '1,2,3;3,2,1' or a JSON list of lists."""
    try:
        if s.lstrip().startswith("["):
            return [list(map(int, d)) for d in json.loads(s)]
        return [[int(x) for x in d.split(",")] for d in s.split(";") if d.strip()]
    except (ValueError, TypeError):
        raise argparse.ArgumentTypeError(f"cannot parse demand vectors {s!r}")


def _show(x) -> str:
    return f"{render_decimal(x)} ({x})"


def _add_instance(p: argparse.ArgumentParser, grid: bool = True) -> None:
    g = p.add_argument_group("instance")
    g.add_argument("--config", help="JSON or TOML file with experiment settings; flags override it")
    g.add_argument("--h", type=int, help="number of relays")
    g.add_argument("--r", type=int, help="relays per user")
    g.add_argument("--D", type=int, help="number of files")
    g.add_argument("--N", type=_fraction, help="normalized relay memory (e.g. 0, 5/2)")
    g.add_argument("--scheme", choices=[k.value for k in SchemeKind], help="scheme kind (default baseline)")
    if grid:
        g.add_argument("--t1", type=int, help="user share of the relay part (baseline, secure_delivery)")
        g.add_argument("--t2", "--t", dest="t2", type=int, help="grid parameter t2 (t for shared schemes)")
        g.add_argument("--M", type=_fraction, help="memory budget; picks the best grid point within it")
        g.add_argument("--width", type=int, help="field symbol width in bits (default 8)")
        g.add_argument("--seed", type=_seed, help="integer seed or 'random' (default: fixed)")


def _mapping(args, keys) -> dict:
    data = load_config(args.config) if getattr(args, "config", None) else {}
    if "t" in data and getattr(args, "t2", None) is not None:
        data.pop("t")                   # the flag wins over the file
    elif "t" in data and "t2" not in data:
        data["t2"] = data.pop("t")
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            data[k] = v
    return data


_CONFIG_KEYS = ["h", "r", "D", "N", "scheme", "t1", "t2", "M", "width", "seed"]


def _config(args, extra=()) -> ExperimentConfig:
    return config_from_mapping(_mapping(args, _CONFIG_KEYS + list(extra))).validate()


# -- subcommands --------------------------------------------------------------

def cmd_simulate(args) -> int:
    cfg = _config(args, ["demand", "demands", "n_random", "F_multiplier", "audit", "dump"])
    rep = run_experiment(cfg)
    if args.json:
        print(json.dumps({
            "status": rep.status, "params": rep.params, "F": rep.F, "seed": rep.seed,
            "R1": str(rep.R1), "R2": str(rep.R2),
            "R1_theory": str(rep.theory.R1), "R2_theory": str(rep.theory.R2),
            "R1_lower": str(rep.lower_R1), "R2_lower": str(rep.lower_R2),
            "server_bits": rep.server_bits, "relay_bits": rep.relay_bits,
            "decode_verified": rep.decode_verified, "memory_verified": rep.memory_verified,
            "rates_match": rep.rates_match, "failures": rep.failures,
            "audits": [{"name": a.name, "passed": a.passed, "checks": a.lines()} for a in rep.audits],
        }, indent=2))
    else:
        print("\n".join(rep.lines()))
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_bounds(args) -> int:
    data = _mapping(args, ["h", "r", "D", "N", "scheme", "t1", "t2", "M"])
    try:
        h, r, D = int(data["h"]), int(data["r"]), int(data["D"])
    except KeyError as exc:
        raise ConfigError(f"missing {exc.args[0]}") from exc
    topo = build_topology(h, r)
    N = Fraction(data.get("N", 0))
    kinds = [SchemeKind(data["scheme"])] if data.get("scheme") else list(SchemeKind)
    print(f"h={h} r={r} K={topo.K} Khat={topo.Khat} D={D} N={N}")
    if data.get("t2") is not None:
        for kind in kinds:
            p = rate_upper(kind, D, topo.Khat, r, N, int(data.get("t1", 0)), int(data["t2"]))
            print(f"{kind.value}: M={_show(p.M)} R1={_show(p.R1)} R2={_show(p.R2)}")
        M = p.M
    elif data.get("M") is not None:
        M = Fraction(data["M"])
        for kind in kinds:
            try:
                p = achievable(kind, D, topo.Khat, r, N, M)
            except (ValueError, ParamError) as exc:
                print(f"{kind.value}: not achievable at M={M} ({exc})")
                continue
            print(f"{kind.value}: achievable R1={_show(p.R1)} R2={_show(p.R2)}")
    else:
        raise ConfigError("bounds needs --M or a grid point --t2")
    print(f"lower R1 = {_show(rate_lower_R1(h, r, D, topo.K, M, N))}")
    print(f"lower R2 = {_show(rate_lower_R2(r, D, M))}")
    return EXIT_OK


def _parse_points(s: str) -> list:
    try:
        out = []
        for item in s.split(","):
            a, _, b = item.partition(":")
            out.append((int(a), int(b)) if b else (0, int(a)))
        return out
    except ValueError:
        raise argparse.ArgumentTypeError(f"points must look like '0:1,0:2' or '1,2', got {s!r}")


def cmd_sweep(args) -> int:
    data = _mapping(args, _CONFIG_KEYS + ["F_multiplier", "csv", "dat", "svg"])
    data.setdefault("t2", 0)            # placeholder; sweep_configs sets each point
    base = config_from_mapping(data).validate()
    memories = [Fraction(m) for m in args.memories.split(",")] if args.memories else None
    rows = sweep(base, points=args.points, memories=memories, workers=args.workers)
    formats = {f: getattr(args, f) or getattr(base, f) for f in ("dat", "svg")}
    formats = {f: path for f, path in formats.items() if path}
    csv_path = args.csv or base.csv or "sweep.csv"
    written = emit_plot_data(rows, csv_path, formats, precision=args.precision)
    for r in rows:
        line = (f"{r['index']:>3} t1={r['t1']} t2={r['t2']} M={'-' if r['M'] is None else render_decimal(r['M'])} "
                f"R1={'-' if r.get('R1_measured') is None else render_decimal(r['R1_measured'])} "
                f"R2={'-' if r.get('R2_measured') is None else render_decimal(r['R2_measured'])} {r['status']}")
        print(line + (f" {r['detail']}" if r["detail"] else ""))
    print("wrote " + ", ".join(str(p) for p in written))
    return EXIT_OK if all(r["status"] == "PASS" for r in rows) else EXIT_FAIL


def cmd_audit(args) -> int:
    cfg = _config(args)
    params = params_for(cfg)
    F = args.F or params.F_min
    reports = []
    if args.which in ("delivery", "both"):
        rng = make_rng(cfg.seed if isinstance(cfg.seed, int) else None)
        lib = Library.random(params.D, F, params.width, rng)
        pl = place(lib, params.topology, params, rng)
        tr = deliver(pl, [(k - 1) % params.D + 1 for k in params.topology.users])
        reports.append(audit_secure_delivery(tr, pl.registry, exhaustive=args.exhaustive, max_bits=args.max_bits))
    if args.which in ("caching", "both"):
        reports.append(audit_secure_caching(params, F, seed=cfg.seed if isinstance(cfg.seed, int) else 0,
                                            exhaustive=args.exhaustive, max_bits=args.max_bits))
    ok = True
    for rep in reports:
        for line in rep.lines():
            print(line)
        print(f"{rep.name}: {'PASS' if rep.passed else 'FAIL'}")
        ok = ok and rep.passed
    return EXIT_OK if ok else EXIT_FAIL


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="combcache",
                                 description="Coded caching in combination networks with caching relays.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="place, deliver, decode and compare against the rate formulas")
    _add_instance(p)
    p.add_argument("--demand", choices=["distinct", "random", "explicit"], help="demand policy")
    p.add_argument("--demands", type=_demands, help="explicit demand vectors, '1,2,3;3,2,1'")
    p.add_argument("--n-random", dest="n_random", type=int, help="extra uniform-random demand vectors")
    p.add_argument("--F-multiplier", dest="F_multiplier", type=int, help="file size as a multiple of F_min")
    p.add_argument("--audit", action="store_true", default=None, help="run the applicable security audits")
    p.add_argument("--dump", help="write placement and transcript as JSON lines")
    p.add_argument("--json", action="store_true", help="print the report as JSON")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bounds", help="closed-form achievable rates and cut-set lower bounds")
    _add_instance(p, grid=False)
    p.add_argument("--M", type=_fraction, help="user memory")
    p.add_argument("--t1", type=int)
    p.add_argument("--t2", "--t", dest="t2", type=int)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("sweep", help="run a grid of experiments and write CSV / plot data")
    _add_instance(p)
    p.add_argument("--points", type=_parse_points, help="grid points 't1:t2,...' (default: whole grid)")
    p.add_argument("--memories", help="memory budgets 'M1,M2,...' instead of grid points")
    p.add_argument("--F-multiplier", dest="F_multiplier", type=int)
    p.add_argument("--csv", help="CSV output path (default sweep.csv)")
    p.add_argument("--dat", help="also write gnuplot data to this path")
    p.add_argument("--svg", help="also write an SVG chart to this path")
    p.add_argument("--precision", type=int, default=6, help="decimal places in CSV (default 6)")
    p.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("audit", help="run the security audits on one instance")
    _add_instance(p)
    p.add_argument("--F", type=int, help="file size in bits (default F_min)")
    p.add_argument("--which", choices=["delivery", "caching", "both"], default="both")
    p.add_argument("--exhaustive", choices=["auto", "yes", "no"], default="auto",
                   type=str.lower, help="enumerate tiny instances (default auto)")
    p.add_argument("--max-bits", dest="max_bits", type=int, default=22,
                   help="cap on library + randomness bits to enumerate (hard limit 24)")
    p.set_defaults(func=cmd_audit)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "exhaustive", None) in ("yes", "no"):
        args.exhaustive = args.exhaustive == "yes"
    try:
        return args.func(args)
    except (ConfigError, ParamError, TopologyError, AuditTooLarge, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
