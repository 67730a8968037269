"""Grid sweeps and their CSV / gnuplot / SVG output.

CSV schema (UTF-8, comma separated)::

    # combcache-sweep v1
    index,scheme,h,r,D,N,t1,t2,M,R1_measured,R2_measured,R1_theory,R2_theory,
    R1_lower,R2_lower,R1_nonincreasing,R2_nonincreasing,status,detail,
    N_exact,M_exact,R1_measured_exact,R2_measured_exact,R1_theory_exact,
    R2_theory_exact,R1_lower_exact,R2_lower_exact

Decimal columns are rounded to the configured precision with trailing zeros
stripped; ``*_exact`` columns hold the same values as ``p/q`` fractions.
Empty cells mark values a failed point could not produce.
"""
from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from ..params import grid as param_grid
from ..topology import build_topology
from .config import ExperimentConfig
from .fmt import render_decimal
from .runner import run_experiment

CSV_VERSION = "# combcache-sweep v1"
VALUE_COLUMNS = ["N", "M", "R1_measured", "R2_measured", "R1_theory", "R2_theory", "R1_lower", "R2_lower"]
COLUMNS = (["index", "scheme", "h", "r", "D", "N", "t1", "t2", "M", "R1_measured", "R2_measured",
            "R1_theory", "R2_theory", "R1_lower", "R2_lower", "R1_nonincreasing", "R2_nonincreasing",
            "status", "detail"]
           + [f"{c}_exact" for c in VALUE_COLUMNS])


def _point(cfg: ExperimentConfig) -> dict:
    row = {"scheme": cfg.scheme.value, "h": cfg.h, "r": cfg.r, "D": cfg.D, "N": cfg.N,
           "t1": cfg.t1, "t2": cfg.t2, "M": None, "status": "ERROR", "detail": ""}
    try:
        rep = run_experiment(cfg)
    except Exception as exc:                # recorded per point; the sweep goes on
        row["detail"] = f"{type(exc).__name__}: {exc}"
        return row
    row.update(t1=rep.params["t1"], t2=rep.params["t2"], M=Fraction(rep.params["M"]),
               R1_measured=rep.R1, R2_measured=rep.R2,
               R1_theory=rep.theory.R1, R2_theory=rep.theory.R2,
               R1_lower=rep.lower_R1, R2_lower=rep.lower_R2,
               status=rep.status, detail="; ".join(rep.failures))
    return row


def sweep_configs(base: ExperimentConfig, points=None, memories=None) -> list[ExperimentConfig]:
    """One config per grid point (default: the scheme's whole grid) or per memory budget."""
    if memories is not None:
        return [base.with_(t2=None, t1=0, M=Fraction(m)) for m in memories]
    if points is None:
        points = param_grid(base.scheme, build_topology(base.h, base.r), base.D, base.N)
    return [base.with_(t1=t1, t2=t2, M=None) for t1, t2 in points]


def _flag_monotone(rows: list[dict]) -> None:
    """Flag whether each measured rate is no larger than at the next smaller M."""
    ok = [r for r in rows if r.get("R1_measured") is not None]
    order = sorted(ok, key=lambda r: (r["M"], r["index"]))
    for key in ("R1", "R2"):
        prev = None
        for r in order:
            r[f"{key}_nonincreasing"] = prev is None or r[f"{key}_measured"] <= prev
            prev = r[f"{key}_measured"]


def sweep(base: ExperimentConfig, points=None, memories=None, workers: int = 1) -> list[dict]:
    """Run every point; rows come back in grid order whatever the completion order."""
    configs = sweep_configs(base, points, memories)
    if workers > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_point, configs))
    else:
        rows = [_point(c) for c in configs]
    for i, r in enumerate(rows):
        r["index"] = i
    _flag_monotone(rows)
    return rows


def _cells(row: dict, precision: int) -> dict:
    out = {}
    for c in COLUMNS:
        if c.endswith("_exact"):
            v = row.get(c[:-6])
            out[c] = "" if v is None else str(Fraction(v))
        elif c in VALUE_COLUMNS:
            v = row.get(c)
            out[c] = "" if v is None else render_decimal(v, precision)
        else:
            v = row.get(c)
            out[c] = "" if v is None else (str(v).lower() if isinstance(v, bool) else str(v))
    return out


def write_csv(rows: list[dict], path, precision: int = 6) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(CSV_VERSION + "\n")
        w = csv.DictWriter(fh, fieldnames=COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow(_cells(row, precision))
    return path


def read_csv(path) -> list[dict]:
    """Parse a sweep CSV back into rows with exact Fraction values."""
    with open(path, encoding="utf-8", newline="") as fh:
        first = fh.readline().rstrip("\n")
        if first != CSV_VERSION:
            raise ValueError(f"unsupported sweep CSV header {first!r}")
        reader = csv.DictReader(fh)
        if reader.fieldnames != COLUMNS:
            raise ValueError("sweep CSV columns do not match the v1 schema")
        rows = []
        for raw in reader:
            row = {"index": int(raw["index"]), "scheme": raw["scheme"], "status": raw["status"],
                   "detail": raw["detail"]}
            for c in ("h", "r", "D", "t1", "t2"):
                row[c] = int(raw[c]) if raw[c] else None
            for c in VALUE_COLUMNS:
                row[c] = Fraction(raw[f"{c}_exact"]) if raw[f"{c}_exact"] else None
            for c in ("R1_nonincreasing", "R2_nonincreasing"):
                row[c] = {"true": True, "false": False}.get(raw[c])
            rows.append(row)
    return rows


def write_dat(rows: list[dict], path, precision: int = 6) -> Path:
    """Whitespace-separated columns for gnuplot, one block per scheme."""
    path = Path(path)
    cols = ["M", "R1_measured", "R2_measured", "R1_theory", "R2_theory", "R1_lower", "R2_lower"]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CSV_VERSION.replace("sweep", "plot") + "\n")
        for scheme in dict.fromkeys(r["scheme"] for r in rows):
            fh.write(f"# scheme {scheme}\n# " + " ".join(cols) + "\n")
            pts = sorted((r for r in rows if r["scheme"] == scheme and r.get("R1_measured") is not None),
                         key=lambda r: r["M"])
            for r in pts:
                fh.write(" ".join(render_decimal(r[c], precision) for c in cols) + "\n")
            fh.write("\n\n")
    return path


def write_svg(rows: list[dict], path, title: str | None = None) -> Path:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path = Path(path)
    with matplotlib.rc_context({"svg.hashsalt": "combcache", "svg.fonttype": "none"}):
        fig, (a1, a2) = plt.subplots(1, 2, figsize=(10, 4))
        for scheme in dict.fromkeys(r["scheme"] for r in rows):
            pts = sorted((r for r in rows if r["scheme"] == scheme and r.get("R1_measured") is not None),
                         key=lambda r: r["M"])
            M = [float(r["M"]) for r in pts]
            a1.plot(M, [float(r["R1_measured"]) for r in pts], marker="o", label=scheme)
            a2.plot(M, [float(r["R2_measured"]) for r in pts], marker="o", label=scheme)
        lows = sorted((r for r in rows if r.get("R1_lower") is not None), key=lambda r: r["M"])
        if lows:
            a1.plot([float(r["M"]) for r in lows], [float(r["R1_lower"]) for r in lows], "k--", label="cut-set")
            a2.plot([float(r["M"]) for r in lows], [float(r["R2_lower"]) for r in lows], "k--", label="cut-set")
        for ax, name in ((a1, "R1"), (a2, "R2")):
            ax.set_xlabel("M")
            ax.set_ylabel(name)
            ax.grid(True, alpha=0.3)
            ax.legend()
        if title:
            fig.suptitle(title)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path


def emit_plot_data(rows: list[dict], csv_path, formats=(), precision: int = 6,
                   title: str | None = None) -> list[Path]:
    """Write the CSV and any of the optional formats.

    ``formats`` names extra outputs ("dat", "svg"), written next to the CSV
    with that suffix, or maps a name to an explicit path.
    """
    if not rows:
        raise ValueError("no rows to emit")
    csv_path = Path(csv_path)
    targets = formats if isinstance(formats, dict) else {f: csv_path.with_suffix(f".{f}") for f in formats}
    unknown = set(targets) - {"dat", "svg"}
    if unknown:
        raise ValueError(f"unknown plot formats: {sorted(unknown)}")
    out = [write_csv(rows, csv_path, precision)]
    if "dat" in targets:
        out.append(write_dat(rows, targets["dat"], precision))
    if "svg" in targets:
        out.append(write_svg(rows, targets["svg"], title))
    return out
