"""Independent brute-force references for the block convolutions.

Nothing here shares code with the run-based kernels: blocks are expanded
to dense arrays, convolved by shifted adds, and every output point is
tested for membership one at a time in exact arithmetic.
"""

from __future__ import annotations

import math

import numpy as np

from ..symbols import Frequency, in_D_M_leK, in_D_MK, weight_p
from .blocks import BlockFunction


def dense_convolution(f1: BlockFunction, f2: BlockFunction):
    """Full convolution (step-weighted) and the (j0, m0, n0) of index 0."""
    d1, w1 = f1.to_dense(f1.bounding_window())
    d2, w2 = f2.to_dense(f2.bounding_window())
    out = np.zeros(tuple(a + b - 1 for a, b in zip(d1.shape, d2.shape)))
    for a, b, c in np.argwhere(d1 != 0):
        out[a:a + d2.shape[0], b:b + d2.shape[1], c:c + d2.shape[2]] += d1[a, b, c] * d2
    origin = (w1.j0 + w2.j0, w1.m_range[0] + w2.m_range[0], w1.n_range[0] + w2.n_range[0])
    return out * float(f1.step), origin


def brute_conv_block_norm(f1: BlockFunction, f2: BlockFunction, M3: int, K3: int,
                          weight: str = "none", exact_cell: bool = False) -> float:
    if weight == "p_on_f1":
        vals = f1.values.copy()
        for r in range(f1.nruns):
            vals[f1.offsets[r]:f1.offsets[r + 1]] *= weight_p(Frequency(int(f1.ms[r]), int(f1.ns[r])))
        f1 = f1.scaled(vals)
    out, (j0, m0, n0) = dense_convolution(f1, f2)
    member = in_D_MK if exact_cell else in_D_M_leK
    total = 0.0
    for a, b, c in np.argwhere(out != 0):
        m, n = m0 + int(b), n0 + int(c)
        if m == 0:
            continue
        f = Frequency(m, n)
        if not member((j0 + int(a)) * f1.step, f, M3, K3):
            continue
        v = out[a, b, c]
        if weight == "p_on_output":
            v *= weight_p(f)
        total += v * v
    return math.sqrt(float(f1.step) * total)


def brute_trilinear_form(f1: BlockFunction, f2: BlockFunction, f3: BlockFunction) -> float:
    out, (j0, m0, n0) = dense_convolution(f1, f2)
    d3, w3 = f3.to_dense(f3.bounding_window())
    total = 0.0
    for a, b, c in np.argwhere(d3 != 0):
        i = (w3.j0 + int(a) - j0, w3.m_range[0] + int(b) - m0, w3.n_range[0] + int(c) - n0)
        if all(0 <= x < s for x, s in zip(i, out.shape)):
            total += out[i] * d3[a, b, c]
    return float(f1.step) * total


def resonant_window_pair(rng: np.random.Generator, M1: int, M2: int, M3: int, K1: int, K2: int,
                         size: int = 16, exact_cell: bool = False, spread: int = 16):
    """Two dense windows (each at most size^3) around a near-resonant pair.

    Used to make oracle comparisons hit nonzero restricted convolutions.
    The output modulation offset is drawn from +-(K1 + K2 + spread).
    """
    from fractions import Fraction

    from ..symbols import I_M_values, omega
    from .blocks import LatticeWindow, random_block_in_window
    from .resonant import resonant_sections

    for _ in range(1000):
        m = int(rng.choice(I_M_values(M3)))
        n = int(rng.integers(-size, size + 1))
        tau = -omega(Frequency(m, n)) + int(rng.integers(-K1 - K2 - spread, K1 + K2 + spread + 1))
        sections = resonant_sections(tau, Frequency(m, n), M1, M2, Fraction(8, 5) * (K1 + K2), (-200, 200))
        pairs = [(m1, x) for m1, rs in sections.items() for a, b in rs for x in range(a, b + 1)]
        if pairs:
            break
    else:
        raise RuntimeError("no resonant pair found")
    m1, n1 = pairs[int(rng.integers(len(pairs)))]

    def window(M, mc, nc):
        ms = [v for v in I_M_values(M) if abs(v - mc) < size // 2] or [mc]
        nw = int(rng.integers(size // 2, size + 1))
        cnt = int(rng.integers(size // 2, size + 1))
        lo = nc - int(rng.integers(0, nw))
        center = -int(round(float(omega(Frequency(mc, nc))))) + int(rng.integers(-2, 3))
        return LatticeWindow((min(ms), max(ms)), (lo, lo + nw - 1), center, 1, cnt)

    w1 = window(M1, m1, n1)
    w2 = window(M2, m - m1, n - n1)
    return (random_block_in_window(rng, w1, M1, K1, exact_cell),
            random_block_in_window(rng, w2, M2, K2, exact_cell))
