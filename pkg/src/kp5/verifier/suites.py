"""Verification suites driven by ``kp5 verify``; each returns a JSON-able dict
with a boolean ``passed``."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from ..errors import PreconditionError
from ..symbols import Frequency, I_M_values, omega, resonance_by_difference
from .blocks import conv_block_norm, random_block, restriction_targets, trilinear_form
from .counting import counting_suite
from .estimates import (
    B_VALUES,
    DEFAULT_REGIME_CONSTANT,
    check_estimate,
    compatible_scales,
    sweep_plan,
)
from .oracles import brute_conv_block_norm, resonant_window_pair
from .resonant import (
    enumerate_resonant_set,
    identity_sweep,
    resonance_gradient_check,
    resonance_identity_holds,
)


def _brute_resonant_set(tau, f: Frequency, M1, M2, Kmax, n_window):
    T = Fraction(tau) + omega(f)
    out = set()
    for m1 in I_M_values(M1):
        m2 = f.m - m1
        if m2 == 0 or m2 not in I_M_values(M2):
            continue
        for n1 in range(n_window[0], n_window[1] + 1):
            if abs(T - resonance_by_difference(Frequency(m1, n1), Frequency(m2, f.n - n1))) <= Kmax:
                out.add(Frequency(m1, n1))
    return out


def resonance_suite(mmax: int = 40, seed: int = 0, samples: int = 2000, enum_cases: int = 30) -> dict:
    sweep = identity_sweep(mmax)
    rng = np.random.default_rng([seed, 1])
    spot_fail = []
    for _ in range(samples):
        m1, m2 = (int(x) for x in rng.integers(-10**6, 10**6, size=2))
        n1, n2 = (int(x) for x in rng.integers(-10**9, 10**9, size=2))
        if 0 in (m1, m2, m1 + m2):
            continue
        f1, f2 = Frequency(m1, n1), Frequency(m2, n2)
        if not (resonance_identity_holds(f1, f2) and resonance_gradient_check(f1, f2)[0]):
            spot_fail.append([m1, n1, m2, n2])
    enum_fail, section_fail, worst = [], [], 0.0
    for i in range(enum_cases):
        r = np.random.default_rng([seed, 2, i])
        M1, M2 = int(2 ** r.integers(0, 3)), int(2 ** r.integers(0, 3))
        m = int(r.choice(I_M_values(M1))) + int(r.choice(I_M_values(M2)))
        if m == 0:
            continue
        f = Frequency(m, int(r.integers(-20, 21)))
        tau = Fraction(int(r.integers(-400, 400))) - omega(f)
        kmax = Fraction(int(r.integers(0, 200)), int(r.integers(1, 4)))
        window = (-60, 60)
        pts, rep = enumerate_resonant_set(tau, f, M1, M2, kmax, window)
        if pts != _brute_resonant_set(tau, f, M1, M2, kmax, window):
            enum_fail.append([str(tau), f.m, f.n, M1, M2, str(kmax)])
        if rep.count > rep.bound:
            section_fail.append([str(tau), f.m, f.n, M1, M2, str(kmax)])
        worst = max(worst, rep.ratio)
    passed = (sweep["resonance_failures"] == 0 and sweep["gradient_failures"] == 0
              and not spot_fail and not enum_fail and not section_fail)
    return {"passed": passed, "sweep": sweep, "spot_samples": samples, "spot_failures": spot_fail[:10],
            "enumeration_cases": enum_cases, "enumeration_failures": enum_fail,
            "section_bound_failures": section_fail, "max_section_ratio": worst}


def counting_check(trials: int = 10000, seed: int = 7) -> dict:
    res = counting_suite(trials, seed)
    passed = all(v["n_exact_failures"] == 0 and v["n_bound_failures"] == 0 for v in res.values())
    return {"passed": passed, **res}


def oracle_check(windows: int = 20, seed: int = 0, size: int = 16, tol: float = 1e-12) -> dict:
    """Run-based restricted convolution vs the dense oracle on resonant windows."""
    worst, nonzero, fails = 0.0, 0, []
    triples = [(a, b, c) for a in (1, 2) for b in (1, 2) for c in (1, 2, 4) if compatible_scales(a, b, c)]
    for i in range(windows):
        rng = np.random.default_rng([seed, 3, i])
        M1, M2, M3 = triples[int(rng.integers(len(triples)))]
        K1, K2, K3 = (int(2 ** rng.integers(2, 5)) for _ in range(3))
        exact = bool(rng.integers(2))
        weight = ("none", "p_on_output", "p_on_f1")[i % 3]
        f1, f2 = resonant_window_pair(rng, M1, M2, M3, K1, K2, size, exact)
        fast = conv_block_norm(f1, f2, M3, K3, weight, exact)
        ref = brute_conv_block_norm(f1, f2, M3, K3, weight, exact)
        err = abs(fast - ref) / ref if ref > 0 else abs(fast)
        nonzero += ref > 0
        worst = max(worst, err)
        if err > tol:
            fails.append({"window": i, "fast": fast, "oracle": ref})
    return {"passed": not fails, "windows": windows, "nonzero": nonzero, "max_rel_err": worst,
            "failures": fails}


def trilinear_check(trials: int = 200, seed: int = 0, cap: float = 4.0) -> dict:
    """Trilinear form over M_min^1/2 K_min^1/2 (#I_min)^1/2 prod ||f_i||."""
    worst, positive = 0.0, 0
    triples = [(a, b, c) for a in (1, 2) for b in (1, 2) for c in (1, 2, 4) if compatible_scales(a, b, c)]
    for i in range(trials):
        rng = np.random.default_rng([seed, 4, i])
        M1, M2, M3 = triples[int(rng.integers(len(triples)))]
        K1, K2, K3 = (int(2 ** rng.integers(0, 5)) for _ in range(3))
        f1, f2 = resonant_window_pair(rng, M1, M2, M3, K1, K2, 16)
        targets, _ = restriction_targets(f1, f2, M3, K3)
        cols = sorted(set(zip(targets.ms.tolist(), targets.ns.tolist())))
        f3 = random_block(rng, cols, M3, K3, f1.step)
        form = trilinear_form(f1, f2, f3)
        sizes = [f.n_support_size() for f in (f1, f2, f3)]
        norms = f1.norm() * f2.norm() * f3.norm()
        if form <= 0 or norms == 0:
            continue
        positive += 1
        bound = math.sqrt(min(M1, M2, M3) * min(K1, K2, K3) * min(sizes)) * norms
        worst = max(worst, form / bound)
    return {"passed": worst <= cap, "trials": trials, "positive": positive, "max_constant": worst, "cap": cap}


def bilinear_suite(mmax: int = 32, trials: int = 50, seed: int = 0,
                   regime_constant=DEFAULT_REGIME_CONSTANT, b_values=B_VALUES) -> dict:
    cases, failed = [], []
    worst: dict[str, float] = {}
    lowmod: dict[int, float] = {}
    for p in sweep_plan(mmax, regime_constant, b_values):
        args = [p[k] for k in ("M1", "M2", "M3", "K1", "K2", "K3")]
        try:
            rep = check_estimate(p["kind"], *args, b=p["b"], trials=trials, seed=seed,
                                 regime_constant=regime_constant)
        except PreconditionError as err:
            cases.append({"params": p, "status": "precondition_failed", "message": str(err)})
            failed.append(p)
            continue
        row = {"params": p, "status": rep.status, "ratio": rep.ratio, "lhs": rep.lhs, "rhs": rep.rhs,
               "report": rep}
        cases.append(row)
        if rep.status == "vacuous":
            continue
        if not math.isfinite(rep.ratio):
            failed.append(p)
        worst[rep.kind] = max(worst.get(rep.kind, 0.0), rep.ratio)
        if rep.kind == "lowmod_18":
            lowmod[p["M1"]] = rep.ratio
    stability = None
    if 8 in lowmod and 32 in lowmod:
        stability = {"ratio_at_8": lowmod[8], "ratio_at_32": lowmod[32],
                     "passed": lowmod[32] <= 2.0 * lowmod[8]}
        if not stability["passed"]:
            failed.append({"check": "lowmod scale stability"})
    oracle = oracle_check(seed=seed)
    tri = trilinear_check(seed=seed)
    passed = not failed and oracle["passed"] and tri["passed"]
    return {"passed": passed, "cases": cases, "max_ratio_by_kind": worst, "lowmod_by_M": lowmod,
            "lowmod_stability": stability, "oracle": oracle, "trilinear": tri,
            "vacuous": sum(c["status"] == "vacuous" for c in cases),
            "failed_cases": failed}
