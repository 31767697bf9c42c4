import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kp5.errors import DomainError
from kp5.verifier import Interval, count_monotone, count_parabola
from kp5.verifier.counting import counting_suite, random_monotone_check, random_parabola_check

coef = st.fractions(min_value=-40, max_value=40, max_denominator=6)


@pytest.mark.parametrize("a, b, c, I, expected", [
    (1, 0, 0, (0, 100), 21),
    (1, 0, 5, (0, 1), 0),
    (2, 1, 0, (0, 10), 5),
])
def test_parabola_examples(a, b, c, I, expected):
    assert count_parabola(a, b, c, Interval(*I)).count == expected


def test_parabola_zero_leading():
    with pytest.raises(DomainError):
        count_parabola(0, 1, 0, Interval(0, 1))


@given(coef.filter(lambda x: x != 0), coef, coef, st.fractions(-300, 300, max_denominator=5),
       st.fractions(0, 600, max_denominator=5))
def test_parabola_matches_brute_force(a, b, c, lo, width):
    I = Interval(lo, lo + width)
    rep = count_parabola(a, b, c, I)
    # |a n^2| dominates beyond this radius
    R = int(abs(b / a)) + int(math.isqrt(int((abs(lo) + width + abs(c)) / abs(a)) + 1)) + 3
    brute = sum(1 for n in range(-R, R + 1) if I.lo <= a * n * n + b * n + c <= I.hi)
    assert rep.count == brute
    assert rep.count <= rep.sharp_bound


@pytest.mark.parametrize("phi, J, d, I, expected", [
    (lambda n: 3 * n, (-10, 10), 3, (0, 9), 4),
    (lambda n: n, (-5, 5), 1, (0, 0), 1),
    (lambda n: n**3, (1, 10), 3, (1, 8), 2),
])
def test_monotone_examples(phi, J, d, I, expected):
    rep = count_monotone(phi, J, d, Interval(*I))
    assert rep.count == expected
    assert rep.count <= rep.sharp_bound


def test_monotone_bad_d():
    with pytest.raises(DomainError):
        count_monotone(lambda n: n, (0, 3), 0, Interval(0, 1))


def test_interval_validation():
    with pytest.raises(ValueError):
        Interval(2, 1)
    assert Fraction(3, 2) in Interval(1, 2)


def test_random_generators_consistent(rng):
    for _ in range(200):
        for chk in (random_parabola_check(rng), random_monotone_check(rng)):
            assert chk.exact_ok and chk.bound_ok, chk


def test_suite_is_seeded():
    a, b = counting_suite(100, 3), counting_suite(100, 3)
    assert a == b
    for v in a.values():
        assert v["n_exact_failures"] == 0 and v["n_bound_failures"] == 0
