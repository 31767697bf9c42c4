"""Kernel dispatch: compiled extension when importable, numpy fallback otherwise.

Set ``KP5_PURE_PYTHON=1`` to force the fallback. Integer kernels operate in
int64; the wrappers below verify headroom and route oversized problems to
exact Python integers.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

_INT64_SAFE = 2**62

if os.environ.get("KP5_PURE_PYTHON", "") == "1":
    _compiled = None
else:
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def backend(name: str | None = None):
    """Module implementing the kernels: 'cython', 'python' or the default."""
    if name is None:
        return _compiled if _compiled is not None else _kernels_py
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built")
        return _compiled
    if name == "python":
        return _kernels_py
    raise ValueError(f"unknown backend {name!r}")


def identity_sweep_bound(mmax: int, nmax: int) -> int:
    """Upper bound on every intermediate magnitude in ``identity_sweep``."""
    M, N = mmax, nmax
    q = 2 * M**3
    a = 3 * M * M
    return 5 * q * q * a + q * 34 * M**5 + 12 * M * M * N * N + 8 * M * M * N * N + 10 * q * q * a


def identity_sweep(mmax: int, nmax: int, impl: str | None = None):
    if identity_sweep_bound(mmax, nmax) >= _INT64_SAFE:
        return _kernels_py.identity_sweep(mmax, nmax, dtype=object)
    return backend(impl).identity_sweep(mmax, nmax)


def parabola_brute_count(A: int, B: int, C: int, LO: int, HI: int, n_lo: int, n_hi: int,
                         impl: str | None = None) -> int:
    nmax = max(abs(n_lo), abs(n_hi))
    bound = abs(A) * nmax * nmax + abs(B) * nmax + abs(C)
    if max(bound, abs(LO), abs(HI)) >= _INT64_SAFE:
        count = 0
        for n in range(n_lo, n_hi + 1):
            if LO <= (A * n + B) * n + C <= HI:
                count += 1
        return count
    return backend(impl).parabola_brute_count(A, B, C, LO, HI, n_lo, n_hi)


# above this mean run length numpy's vectorized convolve beats the compiled
# axpy loop (see benchmarks/bench_kernels.py)
LONG_RUN = 256


def conv_accumulate(v1, off1, start1, v2, off2, start2, tlo, thi, toff, pi, pj, pt, out,
                    impl: str | None = None):
    """Run-pair convolution into target ranges; ``impl=None`` picks by run length."""
    if impl is None and len(pi):
        mean_len = 0.5 * (len(v1) / max(len(off1) - 1, 1) + len(v2) / max(len(off2) - 1, 1))
        impl = "python" if mean_len > LONG_RUN else None
    i64 = lambda a: np.ascontiguousarray(a, dtype=np.int64)
    f64 = lambda a: np.ascontiguousarray(a, dtype=np.float64)
    backend(impl).conv_accumulate(
        f64(v1), i64(off1), i64(start1), f64(v2), i64(off2), i64(start2),
        i64(tlo), i64(thi), i64(toff), i64(pi), i64(pj), i64(pt), out,
    )
    return out
