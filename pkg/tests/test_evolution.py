import math

import numpy as np
import pytest

from kp5.errors import BlowUpError, ConstraintError
from kp5.evolution import (
    SimConfig,
    SimState,
    integrate,
    linear_symbol,
    mean_shift_reduce,
    nonlinear_term,
    phi_functions,
    step,
    with_config,
)
from kp5.spectral import GridSpec, PhysicalField, SpectralField, index_of, random_field, semigroup, to_physical, to_spectral

G = GridSpec(16, 16)


def cfg(**kw):
    base = dict(grid=G, dt=1e-2, t_end=0.1)
    base.update(kw)
    return SimConfig(**base)


def test_linear_symbol_values():
    L = linear_symbol(G)
    assert L[index_of(G, 1, 0)] == pytest.approx(1j)
    assert L[index_of(G, 1, 1)] == pytest.approx(2j)
    assert linear_symbol(G, 3.0)[index_of(G, 1, 0)] == pytest.approx(-2j)
    assert np.all(L[0, :] == 0)


@pytest.mark.parametrize("dealias", ["three_halves_pad", "two_thirds"])
def test_nonlinear_cos(dealias):
    f = to_spectral(PhysicalField.from_function(G, lambda x, y: np.cos(x)))
    x, _ = G.points()
    out = to_physical(nonlinear_term(f, dealias)).values
    assert np.allclose(out, 0.5 * np.sin(2 * x), atol=1e-14)
    assert np.all(nonlinear_term(SpectralField.zeros(G), dealias).coeffs == 0)


def test_padding_is_exact_galerkin(rng):
    # compare against a much finer collocation grid, then truncate
    f = random_field(G, rng, kmax=7)
    fine = GridSpec(64, 64)
    c = np.zeros(fine.shape, complex)
    for m in range(-7, 8):
        for n in range(-7, 8):
            c[index_of(fine, m, n)] = f.coeffs[index_of(G, m, n)]
    big = nonlinear_term(SpectralField(fine, c))
    small = nonlinear_term(f)
    for m in range(-7, 8):
        for n in range(-7, 8):
            assert small.coeffs[index_of(G, m, n)] == pytest.approx(big.coeffs[index_of(fine, m, n)], abs=1e-13)


def test_phi_functions_continuity():
    z = np.array([0.999999, 1.000001, -0.999999, -1.000001, 1e-8, 0.5j, 3 + 4j])
    p1, p2, p3 = phi_functions(z)
    ref1 = np.expm1(z) / z
    assert np.allclose(p1, ref1, rtol=1e-13)
    assert p2[4] == pytest.approx(0.5, rel=1e-7) and p3[4] == pytest.approx(1 / 6, rel=1e-7)


@pytest.mark.parametrize("scheme", ["etdrk4", "lawson4"])
def test_linear_step_is_exact(rng, scheme):
    f = random_field(G, rng)
    c = cfg(scheme=scheme, nonlinear=False)
    out = step(SimState(0.0, f), c).field
    ref = semigroup(f, -c.dt)
    assert np.max(np.abs(out.coeffs - ref.coeffs)) <= 1e-14 * np.max(np.abs(f.coeffs))


def test_zero_field_stays_zero():
    recs, st = integrate(SpectralField.zeros(G), cfg())
    assert all(r.mass == 0 and r.energy == 0 for r in recs)
    assert np.all(st.field.coeffs == 0)


def test_record_every_and_final_time():
    f = SpectralField.from_modes(G, [(1, 0, 0.05)])
    recs, st = integrate(f, cfg(dt=0.03, t_end=0.1, record_every=2))
    assert [round(r.t, 12) for r in recs] == [0.0, 0.06, 0.1]
    assert st.t == pytest.approx(0.1)


def test_linear_only_mass_drift(rng):
    f = random_field(G, rng, kmax=5)
    recs, _ = integrate(f, cfg(nonlinear=False, t_end=1.0))
    m0 = recs[0].mass
    assert max(abs(r.mass - m0) for r in recs) <= 1e-13 * m0


def test_reversibility(rng):
    f = random_field(G, rng, kmax=3, decay=2, amplitude=0.05)
    c = cfg(dt=1e-2, t_end=0.2)
    _, fwd = integrate(f, c)
    _, fine = integrate(f, with_config(c, dt=2.5e-3))
    fwd_err = np.max(np.abs(fwd.field.coeffs - fine.field.coeffs))
    _, back = integrate(fwd.field, c, reverse=True, t0=fwd.t)
    assert back.t == pytest.approx(0.0, abs=1e-12)
    assert np.max(np.abs(back.field.coeffs - f.coeffs)) <= 10 * max(fwd_err, 1e-15)


def test_mean_shift_reduce_examples():
    u = PhysicalField.from_function(G, lambda x, y: 0.3 + np.cos(x))
    v0, c = mean_shift_reduce(u)
    assert c == pytest.approx(0.3)
    assert v0.coeff(1, 0) == pytest.approx(0.5)
    v0.check_invariants()
    _, c0 = mean_shift_reduce(PhysicalField.from_function(G, lambda x, y: np.cos(x)))
    assert c0 == pytest.approx(0.0, abs=1e-16)
    with pytest.raises(ConstraintError):
        mean_shift_reduce(PhysicalField.from_function(G, lambda x, y: np.cos(y)))


def test_blowup_detected():
    f = SpectralField.from_modes(G, [(1, 0, 1e13)])
    with pytest.raises(BlowUpError) as info:
        integrate(f, cfg(nonlinear=False))
    assert info.value.max_coeff > 1e12


@pytest.mark.parametrize("bad", [dict(dt=0), dict(dt=float("nan")), dict(t_end=-1), dict(dt=1.0, t_end=0.5),
                                 dict(scheme="rk4"), dict(dealias="none"), dict(record_every=0)])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        cfg(**bad)


def test_mass_conserved_short_run(rng):
    f = random_field(G, rng, kmax=3, decay=2, amplitude=0.05)
    recs, _ = integrate(f, cfg(dt=1e-3, t_end=0.05))
    # not a conserving scheme; drift is time-discretization error on stiff modes
    assert max(abs(r.mass - recs[0].mass) for r in recs) <= 1e-8 * recs[0].mass
    assert math.isfinite(recs[-1].energy)
