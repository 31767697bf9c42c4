import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kp5.errors import DomainError, IntegrityError
from kp5.spectral import (
    GridSpec,
    PhysicalField,
    SpectralField,
    apply_multiplier,
    lp_project,
    lp_scales,
    random_field,
    semigroup,
    to_physical,
    to_spectral,
)

G = GridSpec(16, 16)


def phys(func, grid=G):
    return PhysicalField.from_function(grid, func)


def test_forward_cos():
    f = to_spectral(phys(lambda x, y: np.cos(x)))
    assert f.coeff(1, 0) == pytest.approx(0.5, abs=1e-15)
    assert f.coeff(-1, 0) == pytest.approx(0.5, abs=1e-15)
    mask = np.ones(G.shape, bool)
    mask[1, 0] = mask[-1, 0] = False
    assert np.max(np.abs(f.coeffs[mask])) < 1e-15


def test_constant_is_projected_out():
    f = to_spectral(phys(lambda x, y: np.ones_like(x)))
    assert np.max(np.abs(f.coeffs)) == 0.0


def test_forward_sine_diagonal():
    f = to_spectral(phys(lambda x, y: np.sin(x + y)))
    assert f.coeff(1, 1) == pytest.approx(1 / 2j, abs=1e-15)
    assert f.coeff(-1, -1) == pytest.approx(-1 / 2j, abs=1e-15)


def test_inverse_examples():
    assert np.all(to_physical(SpectralField.zeros(G)).values == 0.0)
    f = SpectralField.from_modes(G, [(1, 0, 0.5)])
    x, _ = G.points()
    assert np.allclose(to_physical(f).values, np.cos(x), atol=1e-14)


def test_inverse_rejects_broken_reality():
    c = np.zeros(G.shape, complex)
    c[1, 0] = 1.0
    with pytest.raises(IntegrityError):
        to_physical(SpectralField(G, c))


def test_round_trip_random(rng):
    for _ in range(20):
        f = random_field(G, rng)
        assert np.allclose(to_spectral(to_physical(f)).coeffs, f.coeffs, atol=1e-13)
        f.check_invariants()


@pytest.mark.parametrize("kind, src, expected", [
    ("dx", np.cos, lambda x, y: -np.sin(x)),
    ("dx_inv", np.sin, lambda x, y: -np.cos(x)),
])
def test_multipliers_1d(kind, src, expected):
    f = to_spectral(phys(lambda x, y: src(x)))
    x, y = G.points()
    assert np.allclose(to_physical(apply_multiplier(f, kind)).values, expected(x, y), atol=1e-13)


def test_dx_inv_dy_diagonal():
    f = to_spectral(phys(lambda x, y: np.cos(x + y)))
    x, y = G.points()
    assert np.allclose(to_physical(apply_multiplier(f, "dx_inv_dy")).values, np.cos(x + y), atol=1e-13)


def test_unknown_multiplier():
    with pytest.raises(ValueError):
        apply_multiplier(SpectralField.zeros(G), "dy")


def test_semigroup_examples(rng):
    f = random_field(G, rng)
    assert np.array_equal(semigroup(f, 0.0).coeffs, f.coeffs)
    g = SpectralField.from_modes(G, [(1, 1, 0.3 + 0.1j)])
    assert np.allclose(semigroup(g, np.pi).coeffs, g.coeffs, atol=1e-14)


@given(st.floats(-50, 50), st.integers(0, 2**31))
def test_semigroup_isometry_and_group(t, seed):
    f = random_field(G, np.random.default_rng(seed))
    u = semigroup(f, t)
    assert abs(u.l2_norm() - f.l2_norm()) <= 1e-13 * f.l2_norm()
    back = semigroup(u, -t)
    assert np.allclose(back.coeffs, f.coeffs, atol=1e-12)


def test_lp_sharp_examples():
    c1 = to_spectral(phys(lambda x, y: np.cos(x)))
    assert np.allclose(lp_project(c1, 1).coeffs, c1.coeffs)
    c3 = to_spectral(phys(lambda x, y: np.cos(3 * x)))
    assert np.allclose(lp_project(c3, 4).coeffs, c3.coeffs)
    assert np.allclose(lp_project(c3, 2).coeffs, c3.coeffs)
    with pytest.raises(DomainError):
        lp_project(c3, 3)


def test_lp_smooth_partition(rng):
    g = GridSpec(64, 32)
    f = random_field(g, rng)
    total = sum((lp_project(f, M, "smooth") for M in lp_scales(g)), SpectralField.zeros(g))
    assert np.max(np.abs(total.coeffs - f.coeffs)) <= 1e-12 * np.max(np.abs(f.coeffs))


def test_grid_validation():
    with pytest.raises(ValueError):
        GridSpec(15, 16)
    with pytest.raises(ValueError):
        GridSpec(2, 16)


def test_nyquist_lines_zero(rng):
    f = random_field(G, rng)
    assert np.all(f.coeffs[G.nx // 2, :] == 0) and np.all(f.coeffs[:, G.ny // 2] == 0)
    assert np.all(f.coeffs[0, :] == 0)
