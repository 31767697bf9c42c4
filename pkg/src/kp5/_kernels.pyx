# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Callers guarantee int64 headroom (see kernels.py)."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t

cnp.import_array()


def identity_sweep(int64_t mmax, int64_t nmax):
    """Exact resonance and gradient identities over a box, cleared of denominators.

    Returns (checked, bad_resonance, bad_gradient, first_bad) where first_bad
    is (m1, n1, m2, n2) of the first failure or None.
    """
    cdef int64_t m1, m2, m, n1, n2, n, q, a, d, closed, diff, p5
    cdef int64_t checked = 0, bad_r = 0, bad_g = 0
    cdef int64_t fb0 = 0, fb1 = 0, fb2 = 0, fb3 = 0
    cdef bint found = False
    with nogil:
        for m1 in range(-mmax, mmax + 1):
            if m1 == 0:
                continue
            for m2 in range(-mmax, mmax + 1):
                m = m1 + m2
                if m2 == 0 or m == 0:
                    continue
                q = m1 * m2 * m
                a = m1 * m1 + m1 * m2 + m2 * m2
                p5 = m * m * m * m * m - m1 * m1 * m1 * m1 * m1 - m2 * m2 * m2 * m2 * m2
                for n1 in range(-nmax, nmax + 1):
                    for n2 in range(-nmax, nmax + 1):
                        n = n1 + n2
                        d = m1 * n2 - m2 * n1
                        closed = 5 * q * q * a - d * d
                        diff = q * p5 + m1 * m2 * n * n - m2 * m * n1 * n1 - m1 * m * n2 * n2
                        checked += 1
                        if closed != diff:
                            bad_r += 1
                        if d * d != 5 * q * q * a - diff:
                            bad_g += 1
                        if (closed != diff or d * d != 5 * q * q * a - diff) and not found:
                            found = True
                            fb0 = m1; fb1 = n1; fb2 = m2; fb3 = n2
    return int(checked), int(bad_r), int(bad_g), ((fb0, fb1, fb2, fb3) if found else None)


def parabola_brute_count(int64_t A, int64_t B, int64_t C, int64_t LO, int64_t HI,
                         int64_t n_lo, int64_t n_hi):
    """#{n in [n_lo, n_hi] : LO <= A n^2 + B n + C <= HI} by enumeration."""
    cdef int64_t n, val, count = 0
    with nogil:
        for n in range(n_lo, n_hi + 1):
            val = (A * n + B) * n + C
            if LO <= val and val <= HI:
                count += 1
    return int(count)


def conv_accumulate(const double[::1] v1, const int64_t[::1] off1, const int64_t[::1] start1,
                    const double[::1] v2, const int64_t[::1] off2, const int64_t[::1] start2,
                    const int64_t[::1] tlo, const int64_t[::1] thi, const int64_t[::1] toff,
                    const int64_t[::1] pi, const int64_t[::1] pj, const int64_t[::1] pt,
                    double[::1] out):
    """out[target] += sum_a v1[a] v2[k - a] over the listed run pairs.

    Run i of block 1 holds values at tau indices start1[i] + a, a < len; the
    target t covers tau indices tlo[t]..thi[t] stored at out[toff[t]:].
    """
    cdef Py_ssize_t p, npairs = pi.shape[0]
    cdef int64_t i, j, t, s, l1, l2, klo, khi, a, b, blo, bhi, base, o1, o2
    cdef double x
    cdef double *dst
    cdef const double *src
    with nogil:
        for p in range(npairs):
            i = pi[p]; j = pj[p]; t = pt[p]
            o1 = off1[i]; o2 = off2[j]
            l1 = off1[i + 1] - o1
            l2 = off2[j + 1] - o2
            if l1 == 0 or l2 == 0:
                continue
            s = start1[i] + start2[j]
            klo = tlo[t] if tlo[t] > s else s
            khi = thi[t] if thi[t] < s + l1 + l2 - 2 else s + l1 + l2 - 2
            if klo > khi:
                continue
            src = &v2[o2]
            # axpy form: contiguous inner loop over run 2, vectorizable
            for a in range(l1):
                x = v1[o1 + a]
                if x == 0.0:
                    continue
                base = s + a
                blo = klo - base if klo - base > 0 else 0
                bhi = khi - base if khi - base < l2 - 1 else l2 - 1
                if blo > bhi:
                    continue
                dst = &out[toff[t] - tlo[t] + base]
                for b in range(blo, bhi + 1):
                    dst[b] += x * src[b]
