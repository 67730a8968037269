"""JSON-lines dumps of placements and transcripts.

Each line is one object with a ``type`` field.  Payloads are hex strings of
the symbol bytes (big-endian per symbol for 16-bit fields).  Key material is
written only when ``include_keys`` is set; otherwise key records carry the id
and length only.

Record types::

    header      {"type", "format", "params", "F"}
    relay       {"type", "relay", "label", "bits", "hex"}
    user        {"type", "user", "label", "bits", "hex"}
    key         {"type", "owner", "label", "bits", "hex"?}
    signal      {"type", "relay", "label", "key", "bits", "hex"}
    message     {"type", "relay", "user", "part", "label", "key", "bits", "hex"}
"""
from __future__ import annotations

import json

import numpy as np

from .coding.otp import format_key_id
from .model import DeliveryTranscript, PlacementResult
from .subsets import label

FORMAT = "combcache-jsonl/1"


def _hex(a: np.ndarray, width: int) -> str:
    # sub-byte symbols still take one byte each, which keeps the layout obvious
    return np.ascontiguousarray(a).astype(">u2" if width > 8 else np.uint8).tobytes().hex()


def _rec(**kw) -> str:
    return json.dumps(kw, sort_keys=False, separators=(",", ":"))


def _key_rec(owner: str, kid, data, width: int, include_keys: bool) -> str:
    rec = {"type": "key", "owner": owner, "label": format_key_id(kid), "bits": int(data.size) * width}
    if include_keys:
        rec["hex"] = _hex(data, width)
    return _rec(**rec)


def dump_placement(pl: PlacementResult, include_keys: bool = False) -> list[str]:
    p = pl.params
    w = p.width
    lines = [_rec(type="header", format=FORMAT, params=p.describe(), F=pl.F)]
    for j, rc in sorted(pl.relays.items()):
        for n in range(p.D):
            lines.append(_rec(type="relay", relay=j, label=f"f^{{{j},1}}_{{{n + 1}}}",
                              bits=int(rc.part1.shape[1]) * w, hex=_hex(rc.part1[n], w)))
        for kid, data in zip(rc.unicast_key_ids, rc.unicast_keys):
            lines.append(_key_rec(f"relay {j}", kid, data, w, include_keys))
    for k, uc in sorted(pl.users.items()):
        for j, s in sorted(uc.slots.items()):
            for n in range(p.D):
                for b, blk in zip(s.block_ids, s.part1_blocks[n]):
                    lines.append(_rec(type="user", user=k, label=f"f^{{{j},1}}_{{{n + 1},b{b + 1}}}",
                                      bits=int(blk.size) * w, hex=_hex(blk, w)))
                tag = "S^{%d}" % j if s.shared else "f^{%d,2}" % j
                for T, item in zip(s.item_labels, s.items[n]):
                    lines.append(_rec(type="user", user=k, label=f"{tag}_{{{n + 1},{label(T)}}}",
                                      bits=int(item.size) * w, hex=_hex(item, w)))
            for kid, data in zip(s.multicast_key_ids, s.multicast_keys):
                lines.append(_key_rec(f"user {k}", kid, data, w, include_keys))
            if s.unicast_key_id is not None:
                lines.append(_key_rec(f"user {k}", s.unicast_key_id, s.unicast_key, w, include_keys))
    return lines


def dump_transcript(tr: DeliveryTranscript) -> list[str]:
    """Transcripts hold ciphertext only, so nothing needs redacting."""
    w = tr.params.width
    lines = [_rec(type="header", format=FORMAT, params=tr.params.describe(), F=tr.F,
                  demand=list(tr.demand))]
    for j, rt in sorted(tr.relays.items()):
        for S, kid, x in zip(rt.signal_labels, rt.signal_keys, rt.signals):
            lines.append(_rec(type="signal", relay=j, label=f"X^{{{label(S)}}}_{{{j}}}",
                              key=format_key_id(kid) if kid else None,
                              bits=int(x.size) * w, hex=_hex(x, w)))
        for k, m in sorted(rt.messages.items()):
            lines.append(_rec(type="message", relay=j, user=k, part="topup", label=f"f^{{{j},1}}",
                              key=format_key_id(m.topup_key) if m.topup_key else None,
                              bits=int(m.topup.size) * w, hex=_hex(m.topup, w)))
            for S, x in zip(m.forwarded_labels, m.forwarded):
                lines.append(_rec(type="message", relay=j, user=k, part="forward",
                                  label=f"X^{{{label(S)}}}_{{{j}}}", key=None,
                                  bits=int(x.size) * w, hex=_hex(x, w)))
    return lines


def write_jsonl(lines: list[str], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in lines:
            fh.write(line + "\n")


def read_jsonl(path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]
