import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kp5.errors import DomainError
from kp5.symbols import (
    Frequency,
    I_M_values,
    alpha,
    bump_chi,
    bump_eta,
    check_dyadic,
    in_D_M_leK,
    in_D_MK,
    in_I_M,
    omega,
    resonance,
    resonance_by_difference,
    weight_p,
    weight_p_array,
)

nonzero = st.integers(-300, 300).filter(lambda v: v != 0)
ints = st.integers(-10**6, 10**6)


@pytest.mark.parametrize("f, expected", [((1, 0), 1), ((2, 1), Fraction(65, 2)), ((-1, 1), -2)])
def test_omega_examples(f, expected):
    assert omega(f) == expected


def test_omega_m_zero():
    with pytest.raises(DomainError, match="symbol undefined at m=0"):
        omega((0, 3))


@pytest.mark.parametrize("m1, m2, expected", [(1, 1, 3), (2, -1, 3), (0, 5, 25)])
def test_alpha_examples(m1, m2, expected):
    assert alpha(m1, m2) == expected


@pytest.mark.parametrize("f1, f2, expected", [((1, 0), (1, 0), 30), ((1, 1), (1, -1), 28),
                                              ((2, 0), (-1, 0), -30)])
def test_resonance_examples(f1, f2, expected):
    assert resonance(f1, f2) == expected


@pytest.mark.parametrize("f1, f2", [((0, 1), (1, 0)), ((1, 0), (0, 2)), ((2, 1), (-2, 5))])
def test_resonance_degenerate(f1, f2):
    with pytest.raises(DomainError):
        resonance(f1, f2)


@given(nonzero, ints, nonzero, ints)
def test_resonance_closed_form_equals_difference(m1, n1, m2, n2):
    if m1 + m2 == 0:
        return
    assert resonance((m1, n1), (m2, n2)) == resonance_by_difference((m1, n1), (m2, n2))


@given(st.integers(-10**4, 10**4), st.integers(-10**4, 10**4))
def test_alpha_lower_bound(m1, m2):
    assert 4 * alpha(m1, m2) >= 3 * max(m1 * m1, m2 * m2)


@pytest.mark.parametrize("f, expected", [((1, 0), 1.0), ((1, 2), math.sqrt(2)), ((2, 10), math.sqrt(2))])
def test_weight_p_examples(f, expected):
    assert weight_p(f) == pytest.approx(expected, rel=1e-15)


@given(nonzero, ints)
def test_weight_p_symmetries(m, n):
    p = weight_p((m, n))
    assert p >= 1.0
    assert p == weight_p((m, -n)) == weight_p((-m, -n))
    assert weight_p_array(np.array([m]), np.array([n]))[0] == pytest.approx(p, rel=1e-14)


def test_chi_examples():
    assert bump_chi(0.0) == 1.0
    assert bump_chi(2.0) == 0.0
    assert 0.0 < bump_chi(1.45) < 1.0
    assert bump_chi(-1.45) == bump_chi(1.45)


def test_eta_examples():
    assert bump_eta(1, 0.0) == 1.0
    assert bump_eta(4, 4.0) == 1.0
    for K in (2, 8, 64):
        assert bump_eta(K, 0.0) == 0.0


def test_partition_of_unity(rng):
    x = rng.uniform(-1e6, 1e6, size=10**4)
    total = sum(bump_eta(2**k, x) for k in range(22))
    assert np.max(np.abs(total - 1.0)) <= 1e-12


def test_dyadic_cover():
    m = np.arange(1, 2**20 + 1)
    hits = np.zeros_like(m)
    for k in range(22):
        M = 2**k
        hits += (5 * M <= 8 * m) & (5 * m <= 8 * M)
    assert hits.min() >= 1 and hits.max() <= 2
    assert sorted(I_M_values(4)) == [-6, -5, -4, -3, 3, 4, 5, 6]
    assert all(in_I_M(v, 4) for v in I_M_values(4))


@pytest.mark.parametrize("m, M, expected", [(1, 1, True), (3, 4, True), (2, 1, False)])
def test_in_I_M_examples(m, M, expected):
    assert in_I_M(m, M) is expected


def test_in_D_MK_examples():
    assert in_D_MK(-omega((1, 0)), (1, 0), 1, 1)
    assert in_D_MK(-omega((1, 0)) + 4, (1, 0), 1, 4)
    assert not in_D_MK(0, (2, 0), 1, 1)
    with pytest.raises(DomainError):
        in_D_MK(0, (0, 1), 1, 1)


def test_modulation_cells():
    f = Frequency(1, 0)
    base = -omega(f)
    # exact cell at K=4 is 5/2 <= <x> <= 32/5
    assert not in_D_MK(base + 2, f, 1, 4)
    assert in_D_MK(base + 3, f, 1, 4)
    assert in_D_M_leK(base + 2, f, 1, 4)
    assert not in_D_M_leK(base + 7, f, 1, 4)


@pytest.mark.parametrize("bad", [0, 3, -4, 2.0, 6])
def test_check_dyadic_rejects(bad):
    with pytest.raises(DomainError):
        check_dyadic(bad)


def test_frequency_arithmetic():
    a, b = Frequency(2, 1), Frequency(-1, 3)
    assert a + b == Frequency(1, 4)
    assert a - b == Frequency(3, -2)
    assert -a == Frequency(-2, -1)
