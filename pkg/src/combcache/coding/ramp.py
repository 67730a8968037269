"""Non-perfect (ramp) secret sharing.

An (m, n) scheme splits a secret into n - m blocks, prepends m uniformly
random blocks, and multiplies the stacked vector by an n x n Vandermonde
matrix evaluated at the distinct points 0..n-1.  The first m columns of any m
rows form an m x m Vandermonde matrix, which is invertible, so any m shares are
independent of the secret.  All n shares invert the full matrix.  Each share
is |secret| / (n - m) bits.

With m = 0 the scheme is plain fragmentation (identity matrix).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bits import BitBuffer
from .gf import field
from .randomness import draw_symbols


class SecretSharingError(ValueError):
    pass


@dataclass(frozen=True)
class Share:
    index: int  # 1-based position in 1..n
    data: BitBuffer
    file_index: int | None = None
    symbol_index: int | None = None
    label: tuple[int, ...] | None = None


def ramp_feasible(m: int, n: int, width: int) -> bool:
    return 0 <= m < n and (m == 0 or n <= (1 << width))


@lru_cache(maxsize=None)
def sharing_matrix(m: int, n: int, width: int) -> tuple[tuple[int, ...], ...]:
    if not 0 <= m < n:
        raise SecretSharingError(f"need 0 <= m < n, got ({m}, {n})")
    if m == 0:
        return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    gf = field(width)
    if n > gf.order:
        raise SecretSharingError(f"({m},{n}) sharing needs {n} distinct points; GF(2^{width}) has {gf.order}")
    return tuple(tuple(gf.pow(x, e) for e in range(n)) for x in range(n))


@lru_cache(maxsize=None)
def secret_rows(m: int, n: int, width: int) -> tuple[tuple[int, ...], ...]:
    """Rows of the inverse sharing matrix that recover the secret blocks."""
    inv = field(width).inverse_matrix(sharing_matrix(m, n, width))
    return tuple(tuple(row) for row in inv[m:])


def share_array(secret: np.ndarray, m: int, n: int, width: int, rng) -> np.ndarray:
    """Share (..., (n-m)*L) secrets into (..., n, L) shares."""
    if not 0 <= m < n:
        raise SecretSharingError(f"need 0 <= m < n, got ({m}, {n})")
    k = n - m
    if secret.shape[-1] % k:
        raise SecretSharingError(f"secret of {secret.shape[-1]} symbols is not divisible into {k} blocks")
    L = secret.shape[-1] // k
    blocks = secret.reshape(secret.shape[:-1] + (k, L))
    if m == 0:
        return blocks.copy()
    noise = draw_symbols(rng, secret.shape[:-1] + (m, L), width)
    blocks = np.concatenate([noise, blocks], axis=-2)
    return field(width).matmul(sharing_matrix(m, n, width), blocks)


def reconstruct_array(shares: np.ndarray, m: int, n: int, width: int) -> np.ndarray:
    if shares.shape[-2] != n:
        raise SecretSharingError(f"all {n} shares are required, got {shares.shape[-2]}")
    if m == 0:
        return shares.reshape(shares.shape[:-2] + (-1,)).copy()
    out = field(width).matmul(secret_rows(m, n, width), shares)
    return out.reshape(out.shape[:-2] + (-1,))


def ramp_share(secret: BitBuffer, m: int, n: int, rng) -> list[Share]:
    if not 0 <= m < n:
        raise SecretSharingError(f"need 0 <= m < n, got ({m}, {n})")
    if secret.length_bits % ((n - m) * secret.width):
        raise SecretSharingError(
            f"{secret.length_bits}-bit secret does not split into {n - m} whole-symbol blocks")
    out = share_array(secret.symbols, m, n, secret.width, rng)
    return [Share(i + 1, BitBuffer(out[i], secret.width)) for i in range(n)]


def ramp_reconstruct(shares: list[Share], m: int, n: int) -> BitBuffer:
    idx = sorted(s.index for s in shares)
    if idx != list(range(1, n + 1)):
        raise SecretSharingError(f"reconstruction needs all {n} shares, got indexes {idx}")
    widths = {s.data.width for s in shares}
    sizes = {s.data.length_bits for s in shares}
    if len(widths) != 1 or len(sizes) != 1:
        raise SecretSharingError("shares have inconsistent sizes")
    width = widths.pop()
    ordered = sorted(shares, key=lambda s: s.index)
    stacked = np.stack([s.data.symbols for s in ordered])
    return BitBuffer(reconstruct_array(stacked, m, n, width), width)
