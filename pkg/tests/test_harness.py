import json
from fractions import Fraction

import pytest

from combcache.harness import (ConfigError, ExperimentConfig, config_from_mapping, emit_plot_data, load_config,
                               read_csv, render_decimal, run_experiment, sweep, write_csv)
from combcache.harness import runner as runner_mod
from combcache.harness.config import DEFAULT_SEED
from combcache.harness.runner import best_grid_point, params_for
from combcache.harness.sweep import COLUMNS, CSV_VERSION
from combcache.params import ParamError
from combcache.topology import build_topology

WORKED = ExperimentConfig(h=5, r=2, D=10, N=0, t2=3)


# -- config -------------------------------------------------------------------

def test_config_json_and_toml(tmp_path):
    j = tmp_path / "c.json"
    j.write_text(json.dumps({"h": 4, "r": 2, "D": 6, "N": "1/2", "scheme": "secure_caching", "t": 1}))
    cfg = config_from_mapping(load_config(j))
    assert (cfg.t2, cfg.N) == (1, Fraction(1, 2))
    t = tmp_path / "c.toml"
    t.write_text('h = 4\nr = 2\nD = 6\nscheme = "baseline"\nt2 = 1\nseed = 7\n')
    cfg = config_from_mapping(load_config(t)).validate()
    assert cfg.seed == 7 and cfg.scheme.value == "baseline"


@pytest.mark.parametrize("data,msg", [
    ({"h": 4, "r": 2, "D": 6, "t2": 1, "bogus": 1}, "unknown"),
    ({"h": 4, "r": 2, "t2": 1}, "missing"),
    ({"h": 4, "r": 2, "D": 6, "t": 1, "t2": 1}, "not both"),
])
def test_config_rejects(data, msg):
    with pytest.raises(ConfigError, match=msg):
        config_from_mapping(data)


@pytest.mark.parametrize("kw,msg", [
    ({"D": 5}, "K <= D"),
    ({"demand": "explicit"}, "explicit"),
    ({"demand": "sometimes"}, "policy"),
    ({"t2": None}, "grid point"),
    ({"seed": "abc"}, "seed"),
    ({"h": 2, "r": 2}, "r < h"),
    ({"demand": "explicit", "demands": [(1, 2, 3)]}, "demand"),
])
def test_validate(kw, msg):
    base = dict(h=4, r=2, D=6, t2=1)
    base.update(kw)
    with pytest.raises(ConfigError, match=msg):
        ExperimentConfig(**base).validate()


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.json")


def test_default_seed_fixed():
    assert ExperimentConfig(h=4, r=2, D=6, t2=1).seed == DEFAULT_SEED


# -- runner ---------------------------------------------------------------------

def test_worked_example_report():
    rep = run_experiment(WORKED)
    assert rep.passed
    assert (rep.R1, rep.R2) == (Fraction(1, 8), Fraction(1, 8))
    assert rep.wall_time < 1
    assert rep.lines()[-1] == "PASS"


def test_small_instance_report():
    rep = run_experiment(ExperimentConfig(h=4, r=2, D=6, t2=1))
    assert (rep.R1, rep.R2) == (Fraction(1, 2), Fraction(1, 3))


def test_relay_cache_shuts_server_down():
    # M + N r >= D at t1=0, t2=Khat
    rep = run_experiment(ExperimentConfig(h=4, r=2, D=6, N=1, t1=0, t2=3))
    assert rep.passed and rep.server_bits == 0


def test_memory_budget_selects_best_point():
    topo = build_topology(4, 2)
    assert best_grid_point("baseline", topo, 6, 0, Fraction(5, 2)) == (0, 1)
    p = params_for(ExperimentConfig(h=4, r=2, D=6, M=Fraction(5, 2)))
    assert p.M <= Fraction(5, 2)
    with pytest.raises(ParamError, match="grid violation"):
        best_grid_point("secure_delivery", topo, 6, 0, Fraction(1, 2))


def test_random_and_explicit_demands():
    cfg = ExperimentConfig(h=4, r=2, D=6, t2=1, scheme="secure_both", demand="explicit",
                           demands=[(1, 1, 1, 1, 1, 1), (6, 5, 4, 3, 2, 1)], n_random=3)
    rep = run_experiment(cfg)
    assert rep.passed and rep.demands_checked == 5


def test_seed_determinism_and_random_seed():
    a = run_experiment(ExperimentConfig(h=4, r=2, D=6, t2=1, demand="random", n_random=2))
    b = run_experiment(ExperimentConfig(h=4, r=2, D=6, t2=1, demand="random", n_random=2))
    assert a.seed == b.seed == DEFAULT_SEED
    c = run_experiment(ExperimentConfig(h=4, r=2, D=6, t2=1, seed="random"))
    assert c.passed and isinstance(c.seed, int)


def test_audits_attached():
    cfg = ExperimentConfig(h=3, r=2, D=3, t2=1, scheme="secure_both", width=1, audit=True)
    rep = run_experiment(cfg)
    assert [a.name for a in rep.audits] == ["secure_delivery", "secure_caching"]
    assert rep.passed


def test_decode_failure_names_label(monkeypatch):
    real = runner_mod.deliver

    def corrupt(placement, demand):
        tr = real(placement, demand)
        msg = tr.relays[1].messages[1]
        msg.forwarded = msg.forwarded ^ 1
        return tr

    monkeypatch.setattr(runner_mod, "deliver", corrupt)
    rep = run_experiment(ExperimentConfig(h=4, r=2, D=6, t2=1))
    assert not rep.passed and not rep.decode_verified
    assert "user 1 rebuilt f^{1}_{1} incorrectly" in rep.failures[0]


def test_dump(tmp_path):
    out = tmp_path / "run.jsonl"
    run_experiment(ExperimentConfig(h=4, r=2, D=6, t2=1, dump=str(out)))
    assert out.read_text().count("\n") > 10


# -- sweep and output ---------------------------------------------------------------

def test_render_decimal():
    assert render_decimal(Fraction(1, 8)) == "0.125"
    assert render_decimal(Fraction(1)) == "1"
    assert render_decimal(Fraction(1, 3)) == "0.333333"
    assert render_decimal(Fraction(2, 3), 2) == "0.67"


def test_sweep_rows_and_csv_round_trip(tmp_path):
    base = ExperimentConfig(h=4, r=2, D=6, t2=0)
    rows = sweep(base)
    assert [r["t2"] for r in rows] == [0, 1, 2, 3]
    assert all(r["status"] == "PASS" and r["R1_nonincreasing"] for r in rows)
    path = write_csv(rows, tmp_path / "s.csv")
    text = path.read_text()
    assert text.splitlines()[0] == CSV_VERSION
    assert text.splitlines()[1].split(",") == COLUMNS
    back = read_csv(path)
    for r, b in zip(rows, back):
        for c in ("M", "R1_measured", "R2_measured", "R1_theory", "R1_lower"):
            assert b[c] == r[c]


def test_single_point_sweep_equals_run():
    cfg = ExperimentConfig(h=4, r=2, D=6, t2=2)
    row, = sweep(cfg, points=[(0, 2)])
    rep = run_experiment(cfg)
    assert (row["R1_measured"], row["R2_measured"]) == (rep.R1, rep.R2)


def test_sweep_parallel_order_and_bytes(tmp_path):
    base = ExperimentConfig(h=5, r=3, D=50, t2=0, scheme="secure_delivery")
    a = write_csv(sweep(base, workers=1), tmp_path / "a.csv").read_bytes()
    b = write_csv(sweep(base, workers=3), tmp_path / "b.csv").read_bytes()
    assert a == b


def test_sweep_records_errors_and_continues():
    rows = sweep(ExperimentConfig(h=4, r=2, D=6, t2=0), points=[(0, 1), (0, 9), (0, 2)])
    assert [r["status"] for r in rows] == ["PASS", "ERROR", "PASS"]
    assert "grid violation" in rows[1]["detail"]


def test_memory_sweep():
    rows = sweep(ExperimentConfig(h=4, r=2, D=6, t2=0), memories=[0, 2, Fraction(5, 2), 6])
    assert [r["t2"] for r in rows] == [0, 1, 1, 3]


def test_emit_plot_data(tmp_path):
    rows = sweep(ExperimentConfig(h=4, r=2, D=6, t2=0))
    out = emit_plot_data(rows, tmp_path / "s.csv")
    assert [p.suffix for p in out] == [".csv"]
    out = emit_plot_data(rows, tmp_path / "s.csv", ["dat", "svg"])
    assert [p.suffix for p in out] == [".csv", ".dat", ".svg"]
    svg1 = (tmp_path / "s.svg").read_bytes()
    emit_plot_data(rows, tmp_path / "s.csv", ["svg"])
    assert (tmp_path / "s.svg").read_bytes() == svg1
    assert b"<svg" in svg1
    dat = (tmp_path / "s.dat").read_text().splitlines()
    assert dat[1] == "# scheme baseline"
    with pytest.raises(ValueError):
        emit_plot_data([], tmp_path / "x.csv")
    with pytest.raises(ValueError):
        emit_plot_data(rows, tmp_path / "x.csv", ["png"])


def test_emit_surfaces_io_errors(tmp_path):
    rows = sweep(ExperimentConfig(h=4, r=2, D=6, t2=0), points=[(0, 1)])
    with pytest.raises(OSError):
        emit_plot_data(rows, tmp_path / "missing" / "s.csv")
