import json

from combcache import Library, build_topology, deliver, make_params, place
from combcache.coding import make_rng
from combcache.serialize import FORMAT, dump_placement, dump_transcript, read_jsonl, write_jsonl


def _run(kind="secure_delivery", width=None):
    topo = build_topology(4, 2)
    p = make_params(kind, topo, 6, 0, 0, 1, width)
    rng = make_rng(2)
    lib = Library.random(6, p.F_min, p.width, rng)
    pl = place(lib, topo, p, rng)
    return pl, deliver(pl, (1, 2, 3, 4, 5, 6))


def test_round_trip_and_header(tmp_path):
    pl, tr = _run()
    lines = dump_placement(pl) + dump_transcript(tr)
    path = tmp_path / "dump.jsonl"
    write_jsonl(lines, path)
    recs = read_jsonl(path)
    assert recs[0]["type"] == "header" and recs[0]["format"] == FORMAT
    assert {r["type"] for r in recs} >= {"user", "key", "signal", "message"}
    assert all(json.loads(line) == rec for line, rec in zip(lines, recs))


def test_keys_redacted_by_default():
    pl, _ = _run()
    keys = [json.loads(x) for x in dump_placement(pl) if '"key"' in x]
    keys = [k for k in keys if k["type"] == "key"]
    assert keys and all("hex" not in k for k in keys)
    shown = [json.loads(x) for x in dump_placement(pl, include_keys=True)]
    assert all("hex" in k for k in shown if k["type"] == "key")


def test_payload_hex_matches_bits():
    pl, tr = _run("baseline")
    for rec in map(json.loads, dump_transcript(tr)[1:]):
        assert len(rec["hex"]) * 4 == rec["bits"]


def test_wide_field_hex():
    pl, tr = _run("baseline", width=16)
    for rec in map(json.loads, dump_transcript(tr)[1:]):
        assert len(rec["hex"]) * 4 == rec["bits"]


def test_deterministic_dump():
    a = dump_placement(_run()[0])
    b = dump_placement(_run()[0])
    assert a == b
