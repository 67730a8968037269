"""Arithmetic over binary extension fields GF(2^w).

Field elements are stored as unsigned integers; vectors of symbols are numpy
arrays of ``uint8`` (w <= 8) or ``uint16`` (w <= 16).  Addition is XOR, so
every map built from these primitives is GF(2)-linear at the bit level.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

# Primitive polynomials, bit i <-> x^i.
PRIMITIVE_POLYNOMIALS = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0x11D,
    16: 0x1100B,
}


class FieldError(ValueError):
    pass


class GF:
    """GF(2^w) with log/exp tables."""

    def __init__(self, width: int):
        if width not in PRIMITIVE_POLYNOMIALS:
            raise FieldError(f"unsupported field width {width}")
        self.width = width
        self.order = 1 << width
        self.poly = PRIMITIVE_POLYNOMIALS[width]
        self.dtype = np.uint8 if width <= 8 else np.uint16
        q1 = self.order - 1
        exp = np.zeros(2 * q1, dtype=np.int64)
        log = np.zeros(self.order, dtype=np.int64)
        x = 1
        for i in range(q1):
            exp[i] = x
            log[x] = i
            x <<= 1
            if x & self.order:
                x ^= self.poly
        exp[q1:] = exp[:q1]
        self.exp = exp
        self.log = log
        # full product table when it is small enough
        self._table = None
        if width <= 8:
            a = np.arange(self.order)
            la = log[a]
            t = exp[(la[:, None] + la[None, :]) % q1]
            t[0, :] = 0
            t[:, 0] = 0
            self._table = t.astype(np.uint8)

    def __repr__(self):
        return f"GF(2^{self.width})"

    # scalar ops -------------------------------------------------------
    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[(self.log[a] + self.log[b]) % (self.order - 1)])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return int(self.exp[(self.order - 1 - self.log[a]) % (self.order - 1)])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e == 0:
            return 1
        if a == 0:
            return 0
        return int(self.exp[(self.log[a] * e) % (self.order - 1)])

    # vector ops -------------------------------------------------------
    def scale(self, c: int, x: np.ndarray) -> np.ndarray:
        """Multiply every symbol of ``x`` by the constant ``c``."""
        if c == 0:
            return np.zeros_like(x)
        if c == 1:
            return x.copy()
        if self._table is not None:
            return self._table[c][x]
        lx = self.log[x]
        out = self.exp[(lx + self.log[c]) % (self.order - 1)].astype(self.dtype)
        out[x == 0] = 0
        return out

    def matmul(self, A, X: np.ndarray) -> np.ndarray:
        """Apply matrix ``A`` (a x b) along axis -2 of ``X`` (..., b, L)."""
        A = [[int(v) for v in row] for row in A]
        a = len(A)
        b = X.shape[-2]
        out = np.zeros(X.shape[:-2] + (a, X.shape[-1]), dtype=self.dtype)
        for i in range(a):
            acc = out[..., i, :]
            for c in range(b):
                coef = A[i][c]
                if coef:
                    acc ^= self.scale(coef, X[..., c, :])
        return out

    def inverse_matrix(self, A) -> list[list[int]]:
        """Gauss-Jordan inverse; raises FieldError when singular."""
        n = len(A)
        M = [[int(v) for v in row] + [int(i == j) for j in range(n)] for i, row in enumerate(A)]
        for col in range(n):
            piv = next((r for r in range(col, n) if M[r][col]), None)
            if piv is None:
                raise FieldError("singular matrix")
            M[col], M[piv] = M[piv], M[col]
            ic = self.inv(M[col][col])
            M[col] = [self.mul(ic, v) for v in M[col]]
            for r in range(n):
                if r != col and M[r][col]:
                    f = M[r][col]
                    M[r] = [v ^ self.mul(f, p) for v, p in zip(M[r], M[col])]
        return [row[n:] for row in M]


@lru_cache(maxsize=None)
def field(width: int) -> GF:
    return GF(width)
