"""Systematic (h, r) MDS erasure code over GF(2^w).

The generator stacks the r x r identity on top of an (h - r) x r parity block.
The parity block is a Cauchy matrix, so every r x r submatrix of the generator
is invertible.  Single-parity (h = r + 1) and repetition (r = 1) codes use an
all-ones block instead, which keeps them MDS over GF(2) as well.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bits import BitBuffer
from .gf import FieldError, field


class MDSError(ValueError):
    pass


@dataclass(frozen=True)
class EncodedSymbol:
    file_index: int
    symbol_index: int  # 1-based, in 1..h
    data: BitBuffer


def mds_feasible(h: int, r: int, width: int) -> bool:
    if not 1 <= r < h:
        return False
    return r == 1 or h - r == 1 or h <= (1 << width)


@lru_cache(maxsize=None)
def generator_matrix(h: int, r: int, width: int) -> tuple[tuple[int, ...], ...]:
    if not 1 <= r < h:
        raise MDSError(f"need 1 <= r < h, got h={h}, r={r}")
    gf = field(width)
    rows = [tuple(int(i == j) for j in range(r)) for i in range(r)]
    if r == 1 or h - r == 1:
        rows += [tuple([1] * r) for _ in range(h - r)]
    elif h <= gf.order:
        # x_i and y_j are distinct field elements, so x_i ^ y_j != 0
        for i in range(h - r):
            x = r + i
            rows.append(tuple(gf.inv(x ^ y) for y in range(r)))
    else:
        raise MDSError(f"no ({h},{r}) MDS generator over GF(2^{width})")
    return tuple(rows)


@lru_cache(maxsize=None)
def decoding_matrix(h: int, r: int, width: int, indexes: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    """Inverse of the generator rows picked by the 1-based ``indexes``."""
    G = generator_matrix(h, r, width)
    try:
        inv = field(width).inverse_matrix([G[i - 1] for i in indexes])
    except FieldError as exc:  # pragma: no cover - excluded by construction
        raise MDSError(f"symbols {indexes} are not independent") from exc
    return tuple(tuple(row) for row in inv)


def encode_array(data: np.ndarray, h: int, r: int, width: int) -> np.ndarray:
    """Encode (..., r*L) symbol arrays into (..., h, L)."""
    if data.shape[-1] % r:
        raise MDSError(f"length {data.shape[-1]} symbols is not divisible by r={r}")
    L = data.shape[-1] // r
    sub = data.reshape(data.shape[:-1] + (r, L))
    return field(width).matmul(generator_matrix(h, r, width), sub)


def decode_array(pieces: dict[int, np.ndarray], h: int, r: int, width: int) -> np.ndarray:
    """Rebuild (..., r*L) from any r encoded symbols keyed by 1-based index."""
    if len(pieces) < r:
        raise MDSError(f"need {r} symbols, got {len(pieces)}")
    idx = tuple(sorted(pieces)[:r])
    stacked = np.stack([pieces[i] for i in idx], axis=-2)
    sub = field(width).matmul(decoding_matrix(h, r, width, idx), stacked)
    return sub.reshape(sub.shape[:-2] + (-1,))


def mds_encode(file: BitBuffer, h: int, r: int, file_index: int = 1) -> list[EncodedSymbol]:
    if file.length_bits % (r * file.width):
        raise MDSError(f"file of {file.length_bits} bits cannot be split into {r} whole-symbol parts")
    enc = encode_array(file.symbols, h, r, file.width)
    return [EncodedSymbol(file_index, i + 1, BitBuffer(enc[i], file.width)) for i in range(h)]


def mds_decode(symbols: list[EncodedSymbol], h: int, r: int) -> BitBuffer:
    idx = [s.symbol_index for s in symbols]
    if len(set(idx)) != len(idx):
        raise MDSError(f"duplicate symbol indexes {sorted(idx)}")
    if len(symbols) < r:
        raise MDSError(f"need at least {r} symbols, got {len(symbols)}")
    if any(not 1 <= i <= h for i in idx):
        raise MDSError("symbol index out of range")
    sizes = {s.data.length_bits for s in symbols}
    widths = {s.data.width for s in symbols}
    if len(sizes) != 1 or len(widths) != 1:
        raise MDSError("encoded symbols have inconsistent lengths")
    width = widths.pop()
    out = decode_array({s.symbol_index: s.data.symbols for s in symbols}, h, r, width)
    return BitBuffer(out, width)
