import math
from fractions import Fraction

import pytest

from kp5.errors import PreconditionError
from kp5.symbols import omega
from kp5.verifier import BlockFunction, check_estimate
from kp5.verifier.blocks import random_block_uniform
from kp5.verifier.estimates import (
    KINDS,
    STRICT_REGIME_CONSTANT,
    check_preconditions,
    compatible_scales,
    default_tau_step,
    estimate_ratio,
    lowmod_scale_K,
    rhs_factor,
    sweep_plan,
)
from kp5.verifier.oracles import brute_conv_block_norm


@pytest.mark.parametrize("kind", KINDS)
def test_zero_blocks_give_zero(kind, rng):
    M, K = 4, 16
    f = BlockFunction.zeros_like(random_block_uniform(rng, M, K, (-2, 2), exact_cell=kind.startswith("cor")))
    rep = check_estimate(kind, M, M, M, K, K, K, blocks=(f, f))
    assert rep.lhs == 0.0 and rep.ratio == 0.0 and rep.status == "ok"


def test_point_masses_at_resonance():
    # (1,1) + (1,-1) -> (2,0) with both inputs on the dispersive surface
    f1 = BlockFunction.from_runs([(1, 1, int(-omega((1, 1))), [1.0])], 1, 1)
    f2 = BlockFunction.from_runs([(1, -1, int(-omega((1, -1))), [1.0])], 1, 1)
    f1.validate(), f2.validate()
    # output tau = -4, omega(2, 0) = 32, so <tau + omega> = <28>: inside K3 = 32
    rep = check_estimate("coarse_17", 1, 1, 2, 1, 1, 32, blocks=(f1, f2))
    lhs = brute_conv_block_norm(f1, f2, 2, 32)
    assert lhs == pytest.approx(1.0)
    assert rep.lhs == pytest.approx(lhs, rel=1e-14)
    assert rep.ratio == pytest.approx(lhs / rhs_factor("coarse_17", 1, 1, 2, 1, 1, 32), rel=1e-14)
    assert check_estimate("coarse_17", 1, 1, 2, 1, 1, 16, blocks=(f1, f2)).lhs == 0.0


def test_precondition_errors():
    with pytest.raises(PreconditionError, match="b must"):
        check_preconditions("corollary_21", 2, 2, 4, 16, 16, 16, 0.6, Fraction(1, 8))
    with pytest.raises(PreconditionError, match="K2 >= M2"):
        check_preconditions("corollary_22", 2, 4, 4, 16, 8, 16, 0.5, Fraction(1, 8))
    with pytest.raises(PreconditionError, match="low-modulation guard"):
        check_preconditions("lowmod_18", 2, 2, 4, 64, 1, 1, 0.5, Fraction(1, 8))
    assert check_preconditions("lowmod_18", 32, 32, 32, 1, 1, 1, 0.5, STRICT_REGIME_CONSTANT) == "vacuous"
    with pytest.raises(ValueError):
        check_preconditions("nope", 1, 1, 1, 1, 1, 1, 0.5, 1)


def test_vacuous_report():
    rep = check_estimate("lowmod_18", 4, 4, 4, 1, 1, 1, regime_constant=STRICT_REGIME_CONSTANT)
    assert rep.status == "vacuous" and rep.ratio == 0.0


def test_seeded_and_thread_independent(monkeypatch):
    args = ("coarse_17", 2, 2, 4, 4, 16, 16)
    a = check_estimate(*args, trials=6, seed=5)
    monkeypatch.setenv("KP5_THREADS", "1")
    b = check_estimate(*args, trials=6, seed=5)
    assert a.ratios == b.ratios and len(a.ratios) == 6
    assert a.ratio == max(a.ratios) and math.isfinite(a.ratio)


@pytest.mark.parametrize("variant", ["uniform", "adversarial"])
def test_variants_respect_bound(variant):
    rep = check_estimate("coarse_17", 4, 4, 4, 16, 16, 16, trials=4, seed=1, variant=variant)
    assert 0.0 <= rep.ratio < 2.0
    if variant == "adversarial":
        assert rep.ratio > 0.0


def test_ratio_from_explicit_blocks(rng):
    f1 = random_block_uniform(rng, 2, 8, (-3, 3))
    f2 = random_block_uniform(rng, 2, 8, (-3, 3))
    lhs, rhs = estimate_ratio("coarse_17", f1, f2, 4, 32)
    assert lhs == pytest.approx(brute_conv_block_norm(f1, f2, 4, 32), rel=1e-12)
    assert rhs == pytest.approx(rhs_factor("coarse_17", 2, 2, 4, 8, 8, 32) * f1.norm() * f2.norm())


def test_plan_and_helpers():
    assert compatible_scales(1, 1, 2) and not compatible_scales(2, 2, 2)
    assert default_tau_step(64, 1024, 1024) == 2 and default_tau_step(4, 4, 4) == 1
    assert lowmod_scale_K(4) == 16
    plan = sweep_plan(32)
    kinds = {p["kind"] for p in plan}
    assert kinds == set(KINDS)
    low = [p["M1"] for p in plan if p["kind"] == "lowmod_18"]
    assert low == [4, 8, 16, 32]
    assert {p["b"] for p in plan if p["kind"] == "corollary_21"} == {0.25, 0.375, 0.5}
    for p in plan:
        check_preconditions(p["kind"], p["M1"], p["M2"], p["M3"], p["K1"], p["K2"], p["K3"], p["b"], Fraction(1, 8))


def test_report_ledger_row():
    rep = check_estimate("corollary_22", 2, 2, 4, 4, 4, 16, trials=2, seed=0)
    row = rep.ledger_row()
    assert row["kind"] == "corollary_22" and row["K3"] == 16 and row["trials"] == 2
    assert rep.to_dict()["params"]["M1"] == 2
