"""Scalar symbols of the fifth-order KP-I dispersion and dyadic localization.

Every quantity that enters a counting or membership decision is computed in
exact rational arithmetic (:class:`fractions.Fraction`). Floating point is
only used for the smooth bumps and for the weight ``p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError
from .exact import as_fraction, square_band_integers

RationalScalar = Fraction
DyadicScale = int

CHI_PLATEAU = Fraction(5, 4)
CHI_SUPPORT = Fraction(8, 5)
I_LO = Fraction(5, 8)
I_HI = Fraction(8, 5)


@dataclass(frozen=True, slots=True)
class Frequency:
    """Integer lattice point (m, n): x- and y-wavenumber."""

    m: int
    n: int

    def __add__(self, other: "Frequency") -> "Frequency":
        return Frequency(self.m + other.m, self.n + other.n)

    def __sub__(self, other: "Frequency") -> "Frequency":
        return Frequency(self.m - other.m, self.n - other.n)

    def __neg__(self) -> "Frequency":
        return Frequency(-self.m, -self.n)


def _freq(f) -> Frequency:
    return f if isinstance(f, Frequency) else Frequency(*f)


def is_dyadic(value) -> bool:
    return isinstance(value, (int, np.integer)) and value >= 1 and (int(value) & (int(value) - 1)) == 0


def check_dyadic(value, name: str = "scale") -> int:
    if not is_dyadic(value):
        raise DomainError(f"{name} must be a power of two >= 1, got {value!r}")
    return int(value)


def dyadic_scales(upto: int) -> list[int]:
    """All dyadic scales 1, 2, 4, ... <= upto."""
    out, k = [], 1
    while k <= upto:
        out.append(k)
        k *= 2
    return out


# --- dispersion relation and resonance ---------------------------------------


def omega(f) -> Fraction:
    """m^5 + n^2/m, exactly."""
    f = _freq(f)
    if f.m == 0:
        raise DomainError("symbol undefined at m=0")
    return Fraction(f.m**6 + f.n**2, f.m)


def alpha(m1: int, m2: int) -> int:
    return m1 * m1 + m1 * m2 + m2 * m2


def resonance(f1, f2) -> Fraction:
    """Resonance function omega(f1+f2) - omega(f1) - omega(f2), closed form.

    Evaluated as 5 m1 m2 (m1+m2) alpha - (m1 n2 - m2 n1)^2 / (m1 m2 (m1+m2)).
    """
    f1, f2 = _freq(f1), _freq(f2)
    m1, m2 = f1.m, f2.m
    m = m1 + m2
    if m1 == 0 or m2 == 0 or m == 0:
        raise DomainError("resonance undefined when m1, m2 or m1+m2 is zero")
    q = m1 * m2 * m
    d = m1 * f2.n - m2 * f1.n
    return 5 * q * alpha(m1, m2) - Fraction(d * d, q)


def resonance_by_difference(f1, f2) -> Fraction:
    f1, f2 = _freq(f1), _freq(f2)
    return omega(f1 + f2) - omega(f1) - omega(f2)


# --- weights -----------------------------------------------------------------


def japanese(x):
    """<x> = (1 + x^2)^(1/2)."""
    return np.sqrt(1.0 + np.square(x))


def weight_p(f) -> float:
    """p(m, n) = < <m>^-2 n/m >; equals 1 when n = 0."""
    f = _freq(f)
    if f.m == 0:
        raise DomainError("weight p undefined at m=0")
    if f.n == 0:
        return 1.0
    r = Fraction(f.n, f.m * (1 + f.m * f.m))
    return math.sqrt(1.0 + float(r) ** 2)


def weight_p_array(m, n):
    """Vectorized p over integer arrays; entries with m = 0 are set to 1."""
    m = np.asarray(m, dtype=np.float64)
    n = np.asarray(n, dtype=np.float64)
    safe = np.where(m == 0, 1.0, m)
    r = np.where(m == 0, 0.0, n / (safe * (1.0 + safe * safe)))
    return np.sqrt(1.0 + r * r)


# --- Littlewood-Paley bumps --------------------------------------------------


def _smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.clip(t, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


def bump_chi(x):
    """Even cutoff: 1 on [-5/4, 5/4], 0 outside [-8/5, 8/5]."""
    ax = np.abs(np.asarray(x, dtype=np.float64))
    lo, hi = float(CHI_PLATEAU), float(CHI_SUPPORT)
    out = 1.0 - _smooth_step((ax - lo) / (hi - lo))
    return float(out) if np.ndim(out) == 0 else out


def bump_eta(K: int, x):
    """eta_1 = chi and eta_K(x) = chi(x/K) - chi(2x/K) for K > 1."""
    K = check_dyadic(K, "K")
    x = np.asarray(x, dtype=np.float64)
    if K == 1:
        return bump_chi(x)
    out = np.asarray(bump_chi(x / K)) - np.asarray(bump_chi(2.0 * x / K))
    return float(out) if np.ndim(out) == 0 else out


# --- dyadic sets -------------------------------------------------------------


def in_I_M(m: int, M: int) -> bool:
    """5M/8 <= |m| <= 8M/5, exactly."""
    a = abs(int(m))
    return 5 * M <= 8 * a and 5 * a <= 8 * M


def I_M_values(M: int) -> list[int]:
    """Signed integers of I_M in increasing order."""
    lo = -((-5 * M) // 8)
    hi = (8 * M) // 5
    pos = list(range(max(lo, 1), hi + 1))
    return [-k for k in reversed(pos)] + pos


def modulation_bounds(K: int, exact_cell: bool) -> tuple[Fraction | None, Fraction]:
    """Bounds on (tau+omega)^2 encoding <tau+omega> ~ K.

    Cell K is [5K/8, 8K/5] for K > 1 and [1, 8/5] for K = 1. With
    ``exact_cell=False`` the union over K' <= K is used, i.e. <.> <= 8K/5.
    """
    K = check_dyadic(K, "K")
    hi = (I_HI * K) ** 2 - 1
    if not exact_cell or K == 1:
        return None, hi
    return (I_LO * K) ** 2 - 1, hi


def in_D_MK(tau, f, M: int, K: int) -> bool:
    """Membership of (tau, m, n) in D_{M,K} with the fixed cell convention."""
    f = _freq(f)
    if f.m == 0:
        raise DomainError("symbol undefined at m=0")
    if not in_I_M(f.m, M):
        return False
    x = as_fraction(tau) + omega(f)
    lo, hi = modulation_bounds(K, exact_cell=True)
    x2 = x * x
    return (lo is None or x2 >= lo) and x2 <= hi


def in_D_M_leK(tau, f, M: int, K: int) -> bool:
    """Membership in the union of D_{M,K'} over K' <= K."""
    f = _freq(f)
    if f.m == 0:
        raise DomainError("symbol undefined at m=0")
    if not in_I_M(f.m, M):
        return False
    x = as_fraction(tau) + omega(f)
    _, hi = modulation_bounds(K, exact_cell=False)
    return x * x <= hi


def tau_lattice_ranges(f, K: int, step=1, exact_cell: bool = False) -> list[tuple[int, int]]:
    """Integer j with tau = j*step satisfying the modulation condition at f.

    Solves lo <= (j*step + omega)^2 <= hi exactly; at most two ranges.
    """
    step = as_fraction(step)
    lo, hi = modulation_bounds(K, exact_cell)
    v = -omega(f) / step
    h2 = step * step
    return square_band_integers(v, None if lo is None else lo / h2, hi / h2)
