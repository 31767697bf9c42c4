"""Exact integer/rational helpers used by the symbols and the verifier."""

from __future__ import annotations

import math
from fractions import Fraction

RationalScalar = Fraction


def as_fraction(x) -> Fraction:
    """Convert ints, Fractions, floats (exactly) or numeric strings."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def floor_div(p: int, q: int) -> int:
    return p // q


def ceil_div(p: int, q: int) -> int:
    return -((-p) // q)


def isqrt_floor(x: Fraction) -> int:
    """floor(sqrt(x)) for a nonnegative rational x."""
    if x < 0:
        raise ValueError("negative argument")
    return math.isqrt(x.numerator // x.denominator)


def square_band_integers(v, lo, hi) -> list[tuple[int, int]]:
    """Integers n with lo <= (n - v)^2 <= hi, as inclusive ranges.

    ``lo`` may be None (no lower constraint). The solution set of the two
    quadratic inequalities is at most two intervals; each is returned as
    ``(first, last)`` with ``first <= last``. Pure integer arithmetic.
    """
    v = as_fraction(v)
    hi = as_fraction(hi)
    if hi < 0:
        return []
    p, q = v.numerator, v.denominator
    # t = n*q - p ranges over integers; t^2 <= X  <=>  |t| <= isqrt(floor(X))
    s_out = isqrt_floor(hi * q * q)
    first, last = ceil_div(p - s_out, q), floor_div(p + s_out, q)
    if first > last:
        return []
    if lo is None:
        return [(first, last)]
    lo = as_fraction(lo)
    x_in = lo * q * q
    c = ceil_div(x_in.numerator, x_in.denominator)
    if c < 1:
        return [(first, last)]
    # excluded: t^2 < X  <=>  t^2 <= ceil(X) - 1
    s_in = math.isqrt(c - 1)
    in_first, in_last = ceil_div(p - s_in, q), floor_div(p + s_in, q)
    if in_first > in_last:
        return [(first, last)]
    out = []
    if first <= in_first - 1:
        out.append((first, min(last, in_first - 1)))
    if in_last + 1 <= last:
        out.append((max(first, in_last + 1), last))
    return out


def clip_ranges(ranges, lo: int, hi: int) -> list[tuple[int, int]]:
    out = []
    for a, b in ranges:
        a, b = max(a, lo), min(b, hi)
        if a <= b:
            out.append((a, b))
    return out


def range_count(ranges) -> int:
    return sum(b - a + 1 for a, b in ranges)
