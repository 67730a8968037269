import numpy as np
import pytest

from combcache.coding import make_rng


@pytest.fixture
def rng():
    return make_rng(12345)


def gf_mul_reference(a: int, b: int, poly: int, width: int) -> int:
    """Shift-and-add multiply with reduction; independent of the table code."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> width:
            a ^= poly
    return out


def random_file_bits(rng, n_bits: int) -> np.ndarray:
    return rng.integers(0, 2, n_bits, dtype=np.uint8)


def ramp_posterior_uniform(m: int, n: int, w: int, L: int = 1) -> bool:
    """Brute force over every secret and every noise value: for each m-subset
    of shares, the view must be uniform and identically distributed for all
    secrets."""
    from itertools import combinations, product

    from combcache.coding import ScriptedRandomness
    from combcache.coding.ramp import share_array

    k, q = n - m, 1 << w
    noise = np.array(list(product(range(q), repeat=m * L)), dtype=np.int64)   # (B, m*L)
    B = noise.shape[0]
    noise_bits = ((noise[..., None] >> np.arange(w - 1, -1, -1)) & 1).astype(np.uint8).reshape(-1)
    views = list(combinations(range(n), m))
    ref = {v: None for v in views}
    for secret in product(range(q), repeat=k * L):
        batch = np.tile(np.array(secret, dtype=np.uint8), (B, 1))
        shares = share_array(batch, m, n, w, ScriptedRandomness(noise_bits))     # (B, n, L)
        for v in views:
            seen = np.unique(shares[:, list(v), :].reshape(B, -1), axis=0, return_counts=True)
            if len(seen[1]) != q ** (m * L) or set(seen[1].tolist()) != {1}:
                return False
            key = seen[0].tobytes()
            if ref[v] is None:
                ref[v] = key
            elif ref[v] != key:
                return False
    return True
