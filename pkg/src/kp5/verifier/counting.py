"""Exact lattice-point counts behind the parabola and monotone counting lemmas."""

from __future__ import annotations

import math

import numpy as np
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from ..errors import DomainError
from ..exact import as_fraction, range_count, square_band_integers


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", as_fraction(self.lo))
        object.__setattr__(self, "hi", as_fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi


@dataclass
class CountReport:
    count: int
    bound: float
    ratio: float
    witnesses: list = field(default_factory=list)
    sharp_bound: float | None = None
    empty: bool = False

    @classmethod
    def make(cls, count: int, bound: float, witnesses=(), sharp_bound=None) -> "CountReport":
        return cls(count, float(bound), count / max(float(bound), 1.0), list(witnesses)[:10],
                   None if sharp_bound is None else float(sharp_bound), count == 0)

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "bound": self.bound,
            "ratio": self.ratio,
            "sharp_bound": self.sharp_bound,
            "empty": self.empty,
            "witnesses": [list(w) if isinstance(w, tuple) else w for w in self.witnesses],
        }


def _bracket(x: Fraction) -> float:
    return math.sqrt(1.0 + float(x) ** 2)


def parabola_solution_ranges(a, b, c, I: Interval) -> list[tuple[int, int]]:
    """Integer n with a n^2 + b n + c in I, as at most two inclusive ranges."""
    a, b, c = as_fraction(a), as_fraction(b), as_fraction(c)
    if a == 0:
        raise DomainError("leading coefficient must be nonzero")
    lo, hi = I.lo, I.hi
    if a < 0:
        a, b, c, lo, hi = -a, -b, -c, -hi, -lo
    v = -b / (2 * a)
    apex = c - b * b / (4 * a)
    # lo <= a (n - v)^2 + apex <= hi
    return square_band_integers(v, (lo - apex) / a, (hi - apex) / a)


def count_parabola(a, b, c, I: Interval) -> CountReport:
    """Closed-form #{n in Z : a n^2 + b n + c in I}.

    ``bound`` is <(|I|/|a|)^(1/2)>; ``sharp_bound`` is 2 + 2 (|I|/|a|)^(1/2),
    which holds with constant one because the preimage is at most two
    intervals of length at most (|I|/|a|)^(1/2).
    """
    ranges = parabola_solution_ranges(a, b, c, I)
    a = as_fraction(a)
    ratio_sq = I.length / abs(a)
    root = math.sqrt(float(ratio_sq))
    witnesses = []
    for lo, hi in ranges:
        witnesses.extend([lo, hi] if lo != hi else [lo])
    return CountReport.make(range_count(ranges), math.sqrt(1.0 + float(ratio_sq)), witnesses,
                            sharp_bound=2.0 + 2.0 * root)


def count_monotone(phi: Callable[[int], object], J: tuple[int, int], d, I: Interval) -> CountReport:
    """#{n in J : phi(n) in I} by enumeration, with derivative floor d.

    ``d`` must be a certified lower bound for |phi'| on J. ``bound`` is
    <|I|/d>; ``sharp_bound`` is 1 + |I|/d (mean value theorem).
    """
    d = as_fraction(d)
    if d <= 0:
        raise DomainError("derivative lower bound d must be > 0")
    j_lo, j_hi = J
    hits = [n for n in range(j_lo, j_hi + 1) if I.lo <= phi(n) <= I.hi]
    q = I.length / d
    witnesses = hits if len(hits) <= 10 else hits[:5] + hits[-5:]
    return CountReport.make(len(hits), _bracket(q), witnesses, sharp_bound=1.0 + float(q))


# --- seeded random instances with brute-force references ---------------------


@dataclass
class CountCheck:
    """One random instance: closed form vs reference, and the sharp bound."""

    kind: str
    params: dict
    count: int
    reference: int
    sharp_bound: float

    @property
    def exact_ok(self) -> bool:
        return self.count == self.reference

    @property
    def bound_ok(self) -> bool:
        return self.count <= self.sharp_bound


def _small_fraction(rng, lo: int, hi: int, max_den: int = 8) -> Fraction:
    return Fraction(int(rng.integers(lo, hi + 1)), int(rng.integers(1, max_den + 1)))


def random_parabola_check(rng, max_a: int = 1000, max_width: float = 5e5) -> CountCheck:
    """a (n - v)^2 + c0 with the interval inside [c0, c0 + a W^2] (or an exact hit).

    Every solution then lies in [v - W, v + W], so brute force over that box
    is a complete reference. The instance is negated half the time.
    """
    from .. import kernels

    # denominators <= 4 (and 16 on the interval) keep the scaled brute force in int64
    a = _small_fraction(rng, 1, max_a, 4)
    v = _small_fraction(rng, -10**5, 10**5, 4)
    c0 = _small_fraction(rng, -10**6, 10**6, 4)
    W = int(np.exp(rng.uniform(0.0, np.log(max_width))))
    top = a * W * W
    mode = int(rng.integers(4))
    if mode == 0:
        n0 = int(v) + int(rng.integers(-int(W), int(W) + 1))
        lo = hi = a * (n0 - v) ** 2 + c0
    else:
        u = sorted(rng.uniform(0.0, 1.0, size=2))
        lo = c0 + top * Fraction(u[0]).limit_denominator(16) if mode != 1 else c0 - 1
        hi = c0 + top * Fraction(u[1]).limit_denominator(16)
        lo, hi = min(lo, hi), max(lo, hi)
    b, c = -2 * a * v, a * v * v + c0
    if rng.integers(2):
        a, b, c, lo, hi = -a, -b, -c, -hi, -lo
    report = count_parabola(a, b, c, Interval(lo, hi))
    D = math.lcm(a.denominator, b.denominator, c.denominator, lo.denominator, hi.denominator)
    A, B, C = int(a * D), int(b * D), int(c * D)
    LO, HI = int(lo * D), int(hi * D)
    n_lo, n_hi = math.floor(v - W) - 1, math.ceil(v + W) + 1
    ref = kernels.parabola_brute_count(A, B, C, LO, HI, n_lo, n_hi)
    params = {"a": str(a), "b": str(b), "c": str(c), "I": [str(lo), str(hi)]}
    return CountCheck("parabola", params, report.count, ref, report.sharp_bound)


def random_monotone_check(rng, max_len: int = 200) -> CountCheck:
    """Linear or cubic phi on a random J, reference computed independently.

    Linear phi(n) = s n + r is counted in closed form; the cubic
    n^3 + k n by bisection on its (strictly increasing) values.
    """
    j_lo = int(rng.integers(-1000, 1000))
    J = (j_lo, j_lo + int(rng.integers(0, max_len)))
    if rng.integers(2):
        s = _small_fraction(rng, 1, 50) * (1 if rng.integers(2) else -1)
        r = _small_fraction(rng, -100, 100)

        def phi(n, s=s, r=r):
            return s * n + r

        d = abs(s)
    else:
        k = int(rng.integers(1, 20))

        def phi(n, k=k):
            return Fraction(n**3 + k * n)

        d = Fraction(k) if J[0] <= 0 <= J[1] else Fraction(3 * min(J[0] ** 2, J[1] ** 2) + k)
    vals = sorted((phi(J[0]), phi(J[1])))
    pad = (vals[1] - vals[0]) / 4 + 1
    u = sorted(rng.uniform(0.0, 1.0, size=2))
    lo = vals[0] - pad + (vals[1] - vals[0] + 2 * pad) * Fraction(u[0]).limit_denominator(1000)
    hi = vals[0] - pad + (vals[1] - vals[0] + 2 * pad) * Fraction(u[1]).limit_denominator(1000)
    I = Interval(lo, hi)
    report = count_monotone(phi, J, d, I)
    ref = _monotone_reference(phi, J, I)
    return CountCheck("monotone", {"J": list(J), "d": str(d), "I": [str(lo), str(hi)]},
                      report.count, ref, report.sharp_bound)


def _monotone_reference(phi, J, I: Interval) -> int:
    """Count via bisection for the first/last index inside I (phi monotone)."""
    lo, hi = J
    increasing = phi(hi) >= phi(lo)

    def first_at_least(target, strict):
        # smallest n in [lo, hi+1] with g(n) >= target (or > target), g increasing
        g = (lambda n: phi(n)) if increasing else (lambda n: -phi(n))
        a, b = lo, hi + 1
        while a < b:
            mid = (a + b) // 2
            val = g(mid)
            if val > target or (not strict and val == target):
                b = mid
            else:
                a = mid + 1
        return a

    if increasing:
        return max(0, first_at_least(I.hi, True) - first_at_least(I.lo, False))
    return max(0, first_at_least(-I.lo, True) - first_at_least(-I.hi, False))


def counting_suite(trials: int, seed: int) -> dict:
    """Run ``trials`` instances of each lemma; summary with failures listed."""
    out = {}
    for kind, gen in (("parabola", random_parabola_check), ("monotone", random_monotone_check)):
        exact_fail, bound_fail, worst = [], [], 0.0
        for i in range(trials):
            chk = gen(np.random.default_rng([seed, i, 0 if kind == "parabola" else 1]))
            if not chk.exact_ok:
                exact_fail.append(chk.params)
            if not chk.bound_ok:
                bound_fail.append(chk.params)
            worst = max(worst, chk.count / chk.sharp_bound)
        out[kind] = {"trials": trials, "exact_failures": exact_fail[:10], "bound_failures": bound_fail[:10],
                     "n_exact_failures": len(exact_fail), "n_bound_failures": len(bound_fail),
                     "max_count_over_sharp_bound": worst}
    return out
