"""Decimal rendering of exact rationals."""
from __future__ import annotations

from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction


def render_decimal(x, precision: int = 6) -> str:
    """Round half-even to ``precision`` places and strip trailing zeros."""
    x = Fraction(x)
    with localcontext() as ctx:
        ctx.prec = precision + 40
        d = (Decimal(x.numerator) / Decimal(x.denominator)).quantize(Decimal(1).scaleb(-precision),
                                                                      rounding=ROUND_HALF_EVEN)
    s = format(d, "f")
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s
