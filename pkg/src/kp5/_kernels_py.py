"""Pure-Python (numpy) versions of the compiled kernels, same signatures."""

from __future__ import annotations

import numpy as np


def identity_sweep(mmax: int, nmax: int, dtype=np.int64):
    n = np.arange(-nmax, nmax + 1, dtype=dtype)
    if dtype is object:
        n = np.array([int(v) for v in range(-nmax, nmax + 1)], dtype=object)
    n1, n2 = np.meshgrid(n, n, indexing="ij")
    checked = bad_r = bad_g = 0
    first_bad = None
    for m1 in range(-mmax, mmax + 1):
        if m1 == 0:
            continue
        for m2 in range(-mmax, mmax + 1):
            m = m1 + m2
            if m2 == 0 or m == 0:
                continue
            q = m1 * m2 * m
            a = m1 * m1 + m1 * m2 + m2 * m2
            p5 = m**5 - m1**5 - m2**5
            d = m1 * n2 - m2 * n1
            nn = n1 + n2
            closed = 5 * q * q * a - d * d
            diff = q * p5 + m1 * m2 * nn * nn - m2 * m * n1 * n1 - m1 * m * n2 * n2
            br = closed != diff
            bg = d * d != 5 * q * q * a - diff
            checked += br.size
            bad_r += int(np.count_nonzero(br))
            bad_g += int(np.count_nonzero(bg))
            if first_bad is None and (bad_r or bad_g):
                idx = np.argwhere(br | bg)[0]
                first_bad = (m1, int(n1[tuple(idx)]), m2, int(n2[tuple(idx)]))
    return checked, bad_r, bad_g, first_bad


def parabola_brute_count(A, B, C, LO, HI, n_lo, n_hi, chunk=1 << 20):
    count = 0
    for s in range(n_lo, n_hi + 1, chunk):
        n = np.arange(s, min(s + chunk, n_hi + 1), dtype=np.int64)
        val = (A * n + B) * n + C
        count += int(np.count_nonzero((val >= LO) & (val <= HI)))
    return count


def conv_accumulate(v1, off1, start1, v2, off2, start2, tlo, thi, toff, pi, pj, pt, out):
    for i, j, t in zip(pi.tolist(), pj.tolist(), pt.tolist()):
        a = v1[off1[i]:off1[i + 1]]
        b = v2[off2[j]:off2[j + 1]]
        s = int(start1[i] + start2[j])
        klo = max(int(tlo[t]), s)
        khi = min(int(thi[t]), s + len(a) + len(b) - 2)
        if klo > khi:
            continue
        full = np.convolve(a, b)
        base = int(toff[t]) - int(tlo[t])
        out[base + klo:base + khi + 1] += full[klo - s:khi - s + 1]
