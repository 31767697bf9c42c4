"""Resonant-set enumeration and exact resonance identities."""

from __future__ import annotations

import math
from fractions import Fraction

from .. import kernels
from ..errors import DomainError
from ..exact import as_fraction, clip_ranges, range_count, square_band_integers
from ..symbols import Frequency, I_M_values, alpha, in_I_M, omega, resonance, resonance_by_difference
from .counting import CountReport


def resonant_sections(tau, f: Frequency, M1: int, M2: int, Kmax, n_window: tuple[int, int]):
    """Map m1 -> list of n1 ranges forming the resonant set section.

    For fixed m1 (m2 = m - m1) the resonance is a parabola in n1:
    Omega = 5 q alpha - (m1 n - m n1)^2 / q with q = m1 m2 m, so the
    condition |tau + omega(m, n) - Omega| <= Kmax is a band on (n1 - v)^2
    with v = m1 n / m.
    """
    f = f if isinstance(f, Frequency) else Frequency(*f)
    m, n = f.m, f.n
    if m == 0:
        raise DomainError("symbol undefined at m=0")
    T = as_fraction(tau) + omega(f)
    K = as_fraction(Kmax)
    sections = {}
    for m1 in I_M_values(M1):
        m2 = m - m1
        if m2 == 0 or not in_I_M(m2, M2):
            continue
        q = m1 * m2 * m
        A = 5 * q * alpha(m1, m2)
        scale = Fraction(q, m * m)
        ends = sorted([(-K - T + A) * scale, (K - T + A) * scale])
        ranges = clip_ranges(square_band_integers(Fraction(m1 * n, m), ends[0], ends[1]), *n_window)
        if ranges:
            sections[m1] = ranges
    return sections


def enumerate_resonant_set(tau, f: Frequency, M1: int, M2: int, Kmax, n_window: tuple[int, int]):
    """Exact set of (m1, n1) with m1 in I_M1, m - m1 in I_M2 and
    |tau + omega(m, n) - Omega((m1, n1), (m - m1, n - n1))| <= Kmax.

    The report bound is max section size times <number of projected m1>.
    """
    sections = resonant_sections(tau, f, M1, M2, Kmax, n_window)
    points = {Frequency(m1, n1) for m1, ranges in sections.items() for a, b in ranges
              for n1 in range(a, b + 1)}
    max_section = max((range_count(r) for r in sections.values()), default=0)
    proj = len(sections)
    bound = max_section * math.sqrt(1.0 + proj * proj)
    witnesses = sorted(points, key=lambda p: (p.m, p.n))
    witnesses = witnesses[:5] + witnesses[-5:] if len(witnesses) > 10 else witnesses
    report = CountReport.make(len(points), bound, [(p.m, p.n) for p in witnesses])
    return points, report


def resonance_gradient_check(f1, f2) -> tuple[bool, Fraction]:
    """(n1/m1 - n2/m2)^2 == (m/(m1 m2)) (5 m1 m2 m alpha - Omega), exactly.

    Omega comes from the difference of omegas, not the closed form, so the
    check is not a restatement of the formula it tests. Returns the residual.
    """
    f1 = f1 if isinstance(f1, Frequency) else Frequency(*f1)
    f2 = f2 if isinstance(f2, Frequency) else Frequency(*f2)
    m1, m2 = f1.m, f2.m
    m = m1 + m2
    if m1 == 0 or m2 == 0 or m == 0:
        raise DomainError("resonance undefined when m1, m2 or m1+m2 is zero")
    lhs = (Fraction(f1.n, m1) - Fraction(f2.n, m2)) ** 2
    big = Fraction(5 * m1 * m2 * m * alpha(m1, m2))
    rhs = Fraction(m, m1 * m2) * (big - resonance_by_difference(f1, f2))
    return lhs == rhs, lhs - rhs


def resonance_identity_holds(f1, f2) -> bool:
    return resonance(f1, f2) == resonance_by_difference(f1, f2)


def identity_sweep(mmax: int, nmax: int | None = None, impl: str | None = None) -> dict:
    """Both exact identities for all |m_i| <= mmax, |n_i| <= nmax."""
    nmax = mmax if nmax is None else nmax
    checked, bad_r, bad_g, first = kernels.identity_sweep(mmax, nmax, impl=impl)
    return {
        "mmax": mmax,
        "nmax": nmax,
        "checked": checked,
        "resonance_failures": bad_r,
        "gradient_failures": bad_g,
        "first_failure": first,
    }
