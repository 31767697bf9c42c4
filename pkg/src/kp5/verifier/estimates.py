"""Randomized checks of the localized bilinear estimates.

Each trial draws two nonnegative blocks, computes the restricted
convolution norm and divides by the right-hand side of the chosen
estimate; the report keeps the worst trial. Trial i draws from
``default_rng([seed, i])`` so results do not depend on the thread count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from ..errors import PreconditionError
from ..symbols import Frequency, I_M_values, check_dyadic, omega
from .blocks import BlockFunction, conv_block_norm, random_block
from .resonant import resonant_sections

KINDS = ("coarse_17", "lowmod_18", "corollary_21", "corollary_22")
VARIANTS = ("uniform", "adversarial", "mixed")
DEFAULT_REGIME_CONSTANT = Fraction(1, 8)
STRICT_REGIME_CONSTANT = Fraction(1, 10**10)
# runs per unit modulation: the default tau step is K_min / _TAU_POINTS_PER_K
_TAU_POINTS_PER_K = 32
_N_WINDOW = (-(10**12), 10**12)


@dataclass
class EstimateReport:
    kind: str
    lhs: float
    rhs: float
    ratio: float
    params: dict
    trials: int
    seed: int
    regime_constant: float | None = None
    variant: str = "mixed"
    tau_step: float = 1.0
    status: str = "ok"
    ratios: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def ledger_row(self) -> dict:
        p = self.params
        return {"kind": self.kind, **{k: p[k] for k in ("M1", "M2", "M3", "K1", "K2", "K3", "b")},
                "trials": self.trials, "seed": self.seed, "lhs": self.lhs, "rhs": self.rhs,
                "ratio": self.ratio}


def _bracket(x: float) -> float:
    return math.sqrt(1.0 + x * x)


def rhs_factor(kind: str, M1, M2, M3, K1, K2, K3, b: float = 0.5) -> float:
    """Right-hand side of the estimate without the input norms."""
    Ms, Ks = (M1, M2, M3), sorted((K1, K2, K3))
    m_min, m_max = min(Ms), max(Ms)
    k_lo, k_hi = min(K1, K2), max(K1, K2)
    if kind == "coarse_17":
        return math.sqrt(k_lo * m_min) * _bracket((k_hi * min(M1, M2)) ** 0.25)
    if kind == "lowmod_18":
        return math.sqrt(k_lo * m_min) * _bracket(math.sqrt(k_hi / (M3 * m_max)))
    if kind == "corollary_21":
        return math.sqrt(m_min) * m_max ** (-1.0 - 2.0 * b) * math.sqrt(Ks[0] * Ks[2]) * Ks[1] ** b
    if kind == "corollary_22":
        return M1**1.5 * math.sqrt(m_min * Ks[0])
    raise ValueError(f"unknown estimate kind {kind!r}; expected one of {KINDS}")


def regime_bound(M1, M2, M3, regime_constant) -> Fraction:
    m_max = max(M1, M2, M3)
    return Fraction(regime_constant) * M1 * M2 * M3 * m_max * m_max


def check_preconditions(kind, M1, M2, M3, K1, K2, K3, b, regime_constant) -> str:
    """Return ``ok`` or ``vacuous``; raise PreconditionError otherwise."""
    if kind not in KINDS:
        raise ValueError(f"unknown estimate kind {kind!r}; expected one of {KINDS}")
    for name, v in zip(("M1", "M2", "M3", "K1", "K2", "K3"), (M1, M2, M3, K1, K2, K3)):
        check_dyadic(v, name)
    if not Fraction(1, 4) <= Fraction(b) <= Fraction(1, 2):
        raise PreconditionError(f"b must lie in [1/4, 1/2], got {b}")
    if kind == "lowmod_18":
        bound = regime_bound(M1, M2, M3, regime_constant)
        if bound < 1:
            return "vacuous"
        if max(K1, K2, K3) > bound:
            raise PreconditionError(
                f"low-modulation guard K_max <= {float(regime_constant):g}*M1*M2*M3*M_max^2 = {float(bound):g} "
                f"violated by K_max = {max(K1, K2, K3)}")
    if kind in ("corollary_21", "corollary_22"):
        for i, (M, K) in enumerate(((M1, K1), (M2, K2), (M3, K3)), start=1):
            if K < M * M:
                raise PreconditionError(f"guard K{i} >= M{i}^2 violated: K{i}={K}, M{i}={M}")
    return "ok"


def compatible_scales(M1: int, M2: int, M3: int) -> bool:
    """True when some m1 in I_M1, m2 in I_M2 have m1 + m2 in I_M3."""
    third = set(I_M_values(M3))
    return any(a + b in third for a in I_M_values(M1) for b in I_M_values(M2))


def default_tau_step(K1, K2, K3) -> int:
    return max(1, min(K1, K2, K3) // _TAU_POINTS_PER_K)


def _max_workers() -> int:
    env = os.environ.get("KP5_THREADS")
    return max(1, int(env)) if env else max(1, os.cpu_count() or 1)


# --- block generators ---------------------------------------------------------


def uniform_pair(rng, M1, M2, K1, K2, step, exact_cell, half_width=4):
    """Blocks on all m in I_M and a random window of 2*half_width+1 n's."""
    def one(M, K):
        c = int(rng.integers(-8 * M**3, 8 * M**3 + 1))
        cols = [(m, n) for m in I_M_values(M) for n in range(c - half_width, c + half_width + 1)]
        return random_block(rng, cols, M, K, step, exact_cell)
    return one(M1, K1), one(M2, K2)


def _modulation_sample(rng, K, exact_cell) -> int:
    hi = 1.6 * K
    lo = 0.625 * K if exact_cell and K > 1 else 0.0
    return int(round(rng.choice([-1, 1]) * rng.uniform(lo, hi)))


def adversarial_pair(rng, M1, M2, M3, K1, K2, K3, step, exact_cell, targets=2, max_columns=256):
    """Blocks concentrated on near-resonant pairs feeding a few output columns.

    For each target (m, n) and output modulation T, the resonant set of
    (m1, n1) is enumerated exactly; f1 gets the columns (m1, n1) and f2 the
    complementary (m - m1, n - n1), each filled over its whole band.
    """
    cols1, cols2 = [], []
    outs = [m for m in I_M_values(M3)]
    for _ in range(targets):
        m = int(rng.choice(outs))
        n = int(rng.integers(-(M3**3), M3**3 + 1))
        T = _modulation_sample(rng, K3, exact_cell)
        tau = Fraction(T) - omega(Frequency(m, n))
        kmax = Fraction(8, 5) * (K1 + K2)
        sections = resonant_sections(tau, Frequency(m, n), M1, M2, kmax, _N_WINDOW)
        pairs = [(m1, n1) for m1, ranges in sections.items() for a, bb in ranges for n1 in range(a, bb + 1)]
        if len(pairs) > max_columns:
            pick = rng.choice(len(pairs), size=max_columns, replace=False)
            pairs = [pairs[i] for i in sorted(pick)]
        cols1.extend(pairs)
        cols2.extend((m - m1, n - n1) for m1, n1 in pairs)
    cols1 = sorted(set(cols1))
    cols2 = sorted(set(cols2))
    return (random_block(rng, cols1, M1, K1, step, exact_cell),
            random_block(rng, cols2, M2, K2, step, exact_cell))


def trial_blocks(variant, trial, rng, M1, M2, M3, K1, K2, K3, step, exact_cell):
    if variant == "mixed":
        variant = "uniform" if trial % 2 == 0 else "adversarial"
    if variant == "uniform":
        return uniform_pair(rng, M1, M2, K1, K2, step, exact_cell)
    if variant == "adversarial":
        return adversarial_pair(rng, M1, M2, M3, K1, K2, K3, step, exact_cell)
    raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")


# --- the check ----------------------------------------------------------------


def estimate_ratio(kind: str, f1: BlockFunction, f2: BlockFunction, M3: int, K3: int,
                   b: float = 0.5) -> tuple[float, float]:
    """(lhs, rhs) for one pair of blocks; their tags supply M1, M2, K1, K2."""
    exact = kind in ("corollary_21", "corollary_22")
    lhs = conv_block_norm(f1, f2, M3, K3, "none", exact_cell=exact)
    n1 = f1.p_weighted().norm() if kind == "corollary_22" else f1.norm()
    rhs = rhs_factor(kind, f1.M, f2.M, M3, f1.K, f2.K, K3, b) * n1 * f2.norm()
    return lhs, rhs


def check_estimate(kind: str, M1: int, M2: int, M3: int, K1: int, K2: int, K3: int,
                   b: float = 0.5, trials: int = 10, seed: int = 0,
                   regime_constant=DEFAULT_REGIME_CONSTANT, variant: str = "mixed",
                   tau_step: int | None = None, blocks=None) -> EstimateReport:
    """Worst lhs/rhs over seeded random trials.

    ``blocks`` may supply a fixed (f1, f2) pair instead of random draws.
    Raises PreconditionError when a regime guard fails; a low-modulation
    regime that excludes every K >= 1 is skipped with status ``vacuous``.
    """
    status = check_preconditions(kind, M1, M2, M3, K1, K2, K3, b, regime_constant)
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    step = default_tau_step(K1, K2, K3) if tau_step is None else tau_step
    params = {"M1": M1, "M2": M2, "M3": M3, "K1": K1, "K2": K2, "K3": K3, "b": float(b)}
    rc = float(regime_constant) if kind == "lowmod_18" else None
    base = EstimateReport(kind, 0.0, 0.0, 0.0, params, trials if blocks is None else 1, seed, rc,
                          variant, float(step), status)
    if status == "vacuous":
        return base
    exact = kind in ("corollary_21", "corollary_22")

    def run(i: int):
        if blocks is not None:
            f1, f2 = blocks
        else:
            rng = np.random.default_rng([seed, i])
            f1, f2 = trial_blocks(variant, i, rng, M1, M2, M3, K1, K2, K3, step, exact)
        lhs, rhs = estimate_ratio(kind, f1, f2, M3, K3, b)
        return lhs, rhs, (lhs / rhs if rhs > 0 else 0.0)

    n = base.trials
    with ThreadPoolExecutor(max_workers=min(n, _max_workers())) as pool:
        results = list(pool.map(run, range(n)))
    worst = max(range(n), key=lambda i: results[i][2])
    base.lhs, base.rhs, base.ratio = results[worst]
    base.ratios = [r[2] for r in results]
    return base


# --- sweeps -------------------------------------------------------------------

B_VALUES = (0.25, 0.375, 0.5)


def _dyadic_floor(x) -> int:
    x = int(x)
    return 1 << (x.bit_length() - 1) if x >= 1 else 0


def lowmod_scale_K(M: int, regime_constant=DEFAULT_REGIME_CONSTANT) -> int:
    """K used at diagonal scale M: min(M^2, largest dyadic K under the guard)."""
    return min(M * M, _dyadic_floor(regime_bound(M, M, M, regime_constant)))


def sweep_plan(mmax: int = 32, regime_constant=DEFAULT_REGIME_CONSTANT, b_values=B_VALUES) -> list[dict]:
    """Parameter sets of the bilinear suite, one dict per check_estimate call."""
    plan = []
    for M in (4, 8, 16, 32):
        if M > mmax:
            continue
        K = lowmod_scale_K(M, regime_constant)
        Ms = dict(M1=M, M2=M, M3=M)
        plan.append(dict(kind="lowmod_18", **Ms, K1=max(K, 1), K2=max(K, 1), K3=max(K, 1), b=0.5))
    for M in (2, 4, 8, 16):
        if M > mmax:
            continue
        for Ms in ((M, M, M), (1, M, M)):
            if not compatible_scales(*Ms):
                continue
            for kfac in (1, 4):
                k = [kfac * m * m for m in Ms]
                base = dict(M1=Ms[0], M2=Ms[1], M3=Ms[2], K1=k[0], K2=k[1], K3=k[2])
                plan.append(dict(kind="coarse_17", **base, b=0.5))
                plan.extend(dict(kind="corollary_21", **base, b=b) for b in b_values)
                plan.append(dict(kind="corollary_22", **base, b=0.5))
    return plan
