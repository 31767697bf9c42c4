"""Nonnegative block functions on a tau-lattice x Z^2 and their convolutions.

A block is stored as runs: each run is one frequency column (m, n) with
values at consecutive tau indices j (tau = j * step). Membership of every
stored point in D_{M,<=K} (or the single cell D_{M,K}) is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .. import kernels
from ..errors import UsageError
from ..exact import as_fraction
from ..symbols import Frequency, I_M_values, check_dyadic, in_I_M, tau_lattice_ranges, weight_p_array

_KEY_SHIFT = np.int64(1) << np.int64(40)


@dataclass(frozen=True)
class LatticeWindow:
    """Finite box: m in m_range, n in n_range, tau_count points of tau_grid.

    Tau points are center + (k - count//2) * step, k = 0..count-1; ``center``
    must be an integer multiple of ``step`` so windows share one lattice.
    """

    m_range: tuple[int, int]
    n_range: tuple[int, int]
    tau_center: Fraction = Fraction(0)
    tau_step: Fraction = Fraction(1)
    tau_count: int = 1
    exclude_zero_m: bool = True

    def __post_init__(self):
        object.__setattr__(self, "tau_center", as_fraction(self.tau_center))
        object.__setattr__(self, "tau_step", as_fraction(self.tau_step))
        if self.tau_step <= 0 or self.tau_count < 1:
            raise ValueError("tau grid needs step > 0 and count >= 1")
        if self.m_range[0] > self.m_range[1] or self.n_range[0] > self.n_range[1]:
            raise ValueError("empty frequency range")
        if (self.tau_center / self.tau_step).denominator != 1:
            raise ValueError("tau center must lie on the step lattice")

    @property
    def j0(self) -> int:
        return int(self.tau_center / self.tau_step) - self.tau_count // 2

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.tau_count, self.m_range[1] - self.m_range[0] + 1, self.n_range[1] - self.n_range[0] + 1)

    def ms(self) -> range:
        return range(self.m_range[0], self.m_range[1] + 1)

    def ns(self) -> range:
        return range(self.n_range[0], self.n_range[1] + 1)


@dataclass
class BlockFunction:
    """Nonnegative function supported in D_{M,<=K} (or D_{M,K}), stored as runs."""

    ms: np.ndarray
    ns: np.ndarray
    starts: np.ndarray
    offsets: np.ndarray
    values: np.ndarray
    M: int
    K: int
    step: Fraction = Fraction(1)
    exact_cell: bool = False
    window: LatticeWindow | None = field(default=None)

    def __post_init__(self):
        self.ms = np.asarray(self.ms, dtype=np.int64)
        self.ns = np.asarray(self.ns, dtype=np.int64)
        self.starts = np.asarray(self.starts, dtype=np.int64)
        self.offsets = np.asarray(self.offsets, dtype=np.int64)
        self.values = np.asarray(self.values, dtype=np.float64)
        self.step = as_fraction(self.step)
        check_dyadic(self.M, "M")
        check_dyadic(self.K, "K")

    @property
    def nruns(self) -> int:
        return len(self.ms)

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.offsets)

    @property
    def tags(self) -> tuple[int, int]:
        return (self.M, self.K)

    def norm(self) -> float:
        return float(np.sqrt(float(self.step) * np.sum(self.values**2)))

    def p_weighted(self) -> "BlockFunction":
        """Copy with values multiplied by p(m, n) column-wise."""
        w = np.repeat(weight_p_array(self.ms, self.ns), self.lengths)
        return BlockFunction(self.ms, self.ns, self.starts, self.offsets, self.values * w,
                             self.M, self.K, self.step, self.exact_cell, self.window)

    def scaled(self, values: np.ndarray) -> "BlockFunction":
        return BlockFunction(self.ms, self.ns, self.starts, self.offsets, values,
                             self.M, self.K, self.step, self.exact_cell, self.window)

    def n_support_size(self) -> int:
        used = self.ms[self.lengths > 0]
        if used.size == 0:
            return 0
        ns = self.ns[self.lengths > 0]
        return int(ns.max() - ns.min() + 1)

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def validate(self) -> None:
        if np.any(self.values < 0) or not np.all(np.isfinite(self.values)):
            raise ValueError("block values must be finite and nonnegative")
        for r in range(self.nruns):
            lo, hi = self.offsets[r], self.offsets[r + 1]
            if hi == lo:
                continue
            m, n = int(self.ms[r]), int(self.ns[r])
            if m == 0 or not in_I_M(m, self.M):
                raise ValueError(f"run at m={m} outside I_{self.M}")
            j_first, j_last = int(self.starts[r]), int(self.starts[r]) + (hi - lo) - 1
            allowed = tau_lattice_ranges(Frequency(m, n), self.K, self.step, self.exact_cell)
            if not any(a <= j_first and j_last <= b for a, b in allowed):
                raise ValueError(f"run ({m}, {n}) leaves the modulation band of K={self.K}")

    def to_dense(self, window: LatticeWindow | None = None) -> tuple[np.ndarray, LatticeWindow]:
        """Dense array over ``window`` (default: bounding box of the runs)."""
        if window is None:
            window = self.bounding_window()
        if window.tau_step != self.step:
            raise UsageError("window step differs from block step")
        arr = np.zeros(window.shape, dtype=np.float64)
        for r in range(self.nruns):
            lo, hi = self.offsets[r], self.offsets[r + 1]
            if hi == lo:
                continue
            mi = int(self.ms[r]) - window.m_range[0]
            ni = int(self.ns[r]) - window.n_range[0]
            ji = int(self.starts[r]) - window.j0
            if not (0 <= mi < arr.shape[1] and 0 <= ni < arr.shape[2] and 0 <= ji and ji + hi - lo <= arr.shape[0]):
                raise UsageError("block does not fit in window")
            arr[ji:ji + hi - lo, mi, ni] = self.values[lo:hi]
        return arr, window

    def bounding_window(self) -> LatticeWindow:
        if self.window is not None:
            return self.window
        nz = self.lengths > 0
        if not np.any(nz):
            return LatticeWindow((1, 1), (0, 0), 0, self.step, 1)
        j_lo = int(self.starts[nz].min())
        j_hi = int((self.starts + self.lengths - 1)[nz].max())
        count = j_hi - j_lo + 1
        center = (j_lo + count // 2) * self.step
        return LatticeWindow((int(self.ms[nz].min()), int(self.ms[nz].max())),
                             (int(self.ns[nz].min()), int(self.ns[nz].max())),
                             center, self.step, count)

    @classmethod
    def zeros_like(cls, other: "BlockFunction") -> "BlockFunction":
        return other.scaled(np.zeros_like(other.values))

    @classmethod
    def from_runs(cls, runs, M, K, step=1, exact_cell=False, window=None) -> "BlockFunction":
        """``runs``: iterable of (m, n, j_start, values)."""
        ms, ns, starts, offsets, chunks = [], [], [], [0], []
        for m, n, j, vals in runs:
            vals = np.asarray(vals, dtype=np.float64)
            ms.append(m)
            ns.append(n)
            starts.append(j)
            offsets.append(offsets[-1] + len(vals))
            chunks.append(vals)
        values = np.concatenate(chunks) if chunks else np.zeros(0)
        return cls(np.array(ms, dtype=np.int64), np.array(ns, dtype=np.int64),
                   np.array(starts, dtype=np.int64), np.array(offsets, dtype=np.int64),
                   values, M, K, step, exact_cell, window)

    @classmethod
    def from_dense(cls, window: LatticeWindow, values: np.ndarray, M: int, K: int,
                   exact_cell: bool = False) -> "BlockFunction":
        """Wrap a dense array; raises if it is negative or leaves D_{M,<=K}."""
        values = np.asarray(values, dtype=np.float64)
        if values.shape != window.shape:
            raise UsageError(f"values shape {values.shape} != window {window.shape}")
        runs = []
        for mi, m in enumerate(window.ms()):
            for ni, n in enumerate(window.ns()):
                col = values[:, mi, ni]
                nz = np.nonzero(col)[0]
                if nz.size == 0:
                    continue
                a, b = int(nz[0]), int(nz[-1])
                runs.append((m, n, window.j0 + a, col[a:b + 1]))
        block = cls.from_runs(runs, M, K, window.tau_step, exact_cell, window)
        block.validate()
        return block


# --- construction -----------------------------------------------------------


def member_runs(m: int, n: int, K: int, step=1, exact_cell=False, j_clip=None) -> list[tuple[int, int]]:
    ranges = tau_lattice_ranges(Frequency(m, n), K, step, exact_cell)
    if j_clip is not None:
        ranges = [(max(a, j_clip[0]), min(b, j_clip[1])) for a, b in ranges]
        ranges = [(a, b) for a, b in ranges if a <= b]
    return ranges


def random_block(rng: np.random.Generator, columns, M: int, K: int, step=1,
                 exact_cell: bool = False, j_clip=None, window=None) -> BlockFunction:
    """Uniform [0, 1) values on every member point of the given columns."""
    runs = []
    for m, n in columns:
        if m == 0 or not in_I_M(m, M):
            continue
        for a, b in member_runs(m, n, K, step, exact_cell, j_clip):
            runs.append((m, n, a, rng.random(b - a + 1)))
    return BlockFunction.from_runs(runs, M, K, step, exact_cell, window)


def random_block_uniform(rng: np.random.Generator, M: int, K: int, n_range: tuple[int, int],
                         step=1, exact_cell: bool = False) -> BlockFunction:
    cols = [(m, n) for m in I_M_values(M) for n in range(n_range[0], n_range[1] + 1)]
    return random_block(rng, cols, M, K, step, exact_cell)


def random_block_in_window(rng: np.random.Generator, window: LatticeWindow, M: int, K: int,
                           exact_cell: bool = False, density: float = 1.0) -> BlockFunction:
    """Random member values inside a dense window (for oracle comparisons)."""
    j_clip = (window.j0, window.j0 + window.tau_count - 1)
    runs = []
    for m in window.ms():
        if m == 0 or not in_I_M(m, M):
            continue
        for n in window.ns():
            for a, b in member_runs(m, n, K, window.tau_step, exact_cell, j_clip):
                vals = rng.random(b - a + 1)
                if density < 1.0:
                    vals *= rng.random(b - a + 1) < density
                runs.append((m, n, a, vals))
    return BlockFunction.from_runs(runs, M, K, window.tau_step, exact_cell, window)


# --- convolution ------------------------------------------------------------


@dataclass
class Targets:
    """Output runs: column (m, n) and tau index range [jlo, jhi]."""

    ms: np.ndarray
    ns: np.ndarray
    jlo: np.ndarray
    jhi: np.ndarray

    @property
    def offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.jhi - self.jlo + 1)]).astype(np.int64)


def _keys(m, n):
    return np.asarray(m, dtype=np.int64) * _KEY_SHIFT + np.asarray(n, dtype=np.int64)


def _check_compatible(*blocks: BlockFunction) -> None:
    steps = {b.step for b in blocks}
    if len(steps) != 1:
        raise UsageError(f"blocks live on different tau lattices: steps {sorted(steps)}")


def _candidate_pairs(f1: BlockFunction, f2: BlockFunction):
    """All run pairs with nonempty runs, as flat index arrays and sum columns."""
    a = np.nonzero(f1.lengths > 0)[0]
    b = np.nonzero(f2.lengths > 0)[0]
    pi = np.repeat(a, len(b))
    pj = np.tile(b, len(a))
    return pi, pj, f1.ms[pi] + f2.ms[pj], f1.ns[pi] + f2.ns[pj]


def _pair_tau_span(f1, f2, pi, pj):
    lo = f1.starts[pi] + f2.starts[pj]
    hi = lo + f1.lengths[pi] + f2.lengths[pj] - 2
    return lo, hi


def convolve_onto(f1: BlockFunction, f2: BlockFunction, targets: Targets, pairs=None,
                  impl: str | None = None) -> np.ndarray:
    """Raw sums sum_{j1} f1 f2 on each target run (no step factors)."""
    _check_compatible(f1, f2)
    toff = targets.offsets
    out = np.zeros(int(toff[-1]), dtype=np.float64)
    if len(targets.ms) == 0:
        return out
    if pairs is None:
        pi, pj, sm, sn = _candidate_pairs(f1, f2)
    else:
        pi, pj = pairs
        sm, sn = f1.ms[pi] + f2.ms[pj], f1.ns[pi] + f2.ns[pj]
    tkeys = _keys(targets.ms, targets.ns)
    order = np.argsort(tkeys, kind="stable")
    sorted_keys = tkeys[order]
    pk = _keys(sm, sn)
    left = np.searchsorted(sorted_keys, pk, "left")
    right = np.searchsorted(sorted_keys, pk, "right")
    reps = right - left
    pi = np.repeat(pi, reps)
    pj = np.repeat(pj, reps)
    starts = np.repeat(left, reps)
    within = np.arange(len(pi)) - np.repeat(np.cumsum(reps) - reps, reps)
    pt = order[starts + within]
    lo, hi = _pair_tau_span(f1, f2, pi, pj)
    keep = (lo <= targets.jhi[pt]) & (hi >= targets.jlo[pt])
    kernels.conv_accumulate(f1.values, f1.offsets, f1.starts, f2.values, f2.offsets, f2.starts,
                            targets.jlo, targets.jhi, toff, pi[keep], pj[keep], pt[keep], out, impl=impl)
    return out


def restriction_targets(f1: BlockFunction, f2: BlockFunction, M3: int, K3: int,
                        exact_cell: bool = False):
    """Output runs of D_{M3,<=K3} (or D_{M3,K3}) reachable by f1 * f2.

    Pairs are prefiltered in floating point with a generous margin; the
    surviving output columns get exact tau ranges.
    """
    check_dyadic(M3, "M3")
    check_dyadic(K3, "K3")
    pi, pj, sm, sn = _candidate_pairs(f1, f2)
    am = np.abs(sm)
    ok = (sm != 0) & (5 * M3 <= 8 * am) & (5 * am <= 8 * M3)
    pi, pj, sm, sn = pi[ok], pj[ok], sm[ok], sn[ok]
    step = float(f1.step)
    lo, hi = _pair_tau_span(f1, f2, pi, pj)
    smf = sm.astype(np.float64)
    w = smf**5 + sn.astype(np.float64) ** 2 / np.where(smf == 0, 1.0, smf)
    band = 1.6 * K3
    margin = 2.0 + 1e-9 * np.abs(w) + 1e-9 * np.abs(lo * step)
    ok = (lo * step + w <= band + margin) & (hi * step + w >= -band - margin)
    pi, pj, sm, sn = pi[ok], pj[ok], sm[ok], sn[ok]
    cols = np.unique(np.stack([sm, sn], axis=1), axis=0) if len(sm) else np.zeros((0, 2), dtype=np.int64)
    tm, tn, tlo, thi = [], [], [], []
    for m, n in cols.tolist():
        for a, b in tau_lattice_ranges(Frequency(m, n), K3, f1.step, exact_cell):
            tm.append(m)
            tn.append(n)
            tlo.append(a)
            thi.append(b)
    targets = Targets(np.array(tm, dtype=np.int64), np.array(tn, dtype=np.int64),
                      np.array(tlo, dtype=np.int64), np.array(thi, dtype=np.int64))
    return targets, (pi, pj)


def restricted_convolution(f1: BlockFunction, f2: BlockFunction, M3: int, K3: int,
                           exact_cell: bool = False, impl: str | None = None):
    """(targets, values) of 1_{D_M3,<=K3} . (f1 * f2), values include the step."""
    targets, pairs = restriction_targets(f1, f2, M3, K3, exact_cell)
    raw = convolve_onto(f1, f2, targets, pairs, impl=impl)
    return targets, raw * float(f1.step)


def conv_block_norm(f1: BlockFunction, f2: BlockFunction, M3: int, K3: int, weight: str = "none",
                    exact_cell: bool = False, impl: str | None = None) -> float:
    """Discrete L^2 norm of 1_{D_{M3,<=K3}} . (f1 * f2).

    ``weight``: ``none``; ``p_on_output`` multiplies the result by p(m, n);
    ``p_on_f1`` convolves p . f1 with f2.
    """
    if weight not in ("none", "p_on_output", "p_on_f1"):
        raise ValueError(f"unknown weight {weight!r}")
    _check_compatible(f1, f2)
    if weight == "p_on_f1":
        f1 = f1.p_weighted()
    targets, vals = restricted_convolution(f1, f2, M3, K3, exact_cell, impl=impl)
    if weight == "p_on_output" and len(vals):
        lens = targets.jhi - targets.jlo + 1
        vals = vals * np.repeat(weight_p_array(targets.ms, targets.ns), lens)
    return float(np.sqrt(float(f1.step) * np.sum(vals**2)))


def trilinear_form(f1: BlockFunction, f2: BlockFunction, f3: BlockFunction, impl: str | None = None) -> float:
    """step^2 * sum over tau, tau1 and the lattice of f1(.) f2(. - .) f3(.)."""
    _check_compatible(f1, f2, f3)
    nz = f3.lengths > 0
    targets = Targets(f3.ms[nz], f3.ns[nz], f3.starts[nz], (f3.starts + f3.lengths - 1)[nz])
    raw = convolve_onto(f1, f2, targets, impl=impl)
    v3 = np.concatenate([f3.values[f3.offsets[r]:f3.offsets[r + 1]] for r in np.nonzero(nz)[0]]) \
        if np.any(nz) else np.zeros(0)
    h = float(f1.step)
    return float(h * h * np.dot(raw, v3))
