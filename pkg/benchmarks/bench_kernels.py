"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat N] [--json out.json]

Each kernel runs on identical inputs in both backends; results must agree
exactly (integer kernels) or to 1e-12 relative (convolution).
"""

from __future__ import annotations

import argparse
import json
import time

import numpy as np

from kp5 import kernels
from kp5.verifier import blocks
from kp5.verifier.estimates import adversarial_pair, default_tau_step


def _time(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _conv_case(M=16):
    K = M * M
    step = default_tau_step(K, K, K)
    f1, f2 = adversarial_pair(np.random.default_rng(3), M, M, M, K, K, K, step, False, targets=4)
    targets, (pi, pj) = blocks.restriction_targets(f1, f2, M, K)
    return f1, f2, targets, (pi, pj)


def _dense_case(K=256, W=10):
    rng = np.random.default_rng(5)
    f1 = blocks.random_block_uniform(rng, 1, K, (-W, W))
    f2 = blocks.random_block_uniform(rng, 1, K, (-W, W))
    targets, pairs = blocks.restriction_targets(f1, f2, 2, K)
    return f1, f2, targets, pairs


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", default=None)
    args = ap.parse_args(argv)
    if kernels.BACKEND != "cython":
        print("compiled kernels not built; only the python backend is timed")
    impls = ["python"] + (["cython"] if kernels.BACKEND == "cython" else [])

    f1, f2, targets, pairs = _conv_case()
    g1, g2, gt, gp = _dense_case()
    cases = {
        "identity_sweep(mmax=24)": lambda impl: kernels.identity_sweep(24, 24, impl=impl),
        "parabola_brute_count(2e6)": lambda impl: kernels.parabola_brute_count(
            7, -3, 11, 0, 7 * 10**11, -10**6, 10**6, impl=impl),
        "conv sparse resonant (M=16, K=256)": lambda impl: blocks.convolve_onto(f1, f2, targets, pairs, impl=impl),
        "conv dense bands (M=1, K=256)": lambda impl: blocks.convolve_onto(g1, g2, gt, gp, impl=impl),
    }
    rows = []
    for name, fn in cases.items():
        times, outs = {}, {}
        for impl in impls:
            times[impl], outs[impl] = _time(lambda: fn(impl), args.repeat)
        if len(impls) == 2:
            a, b = outs["python"], outs["cython"]
            if isinstance(a, np.ndarray):
                agree = bool(np.allclose(a, b, rtol=1e-12, atol=0))
            else:
                agree = a == b
        else:
            agree = True
        rows.append({"kernel": name, **{f"{k}_s": v for k, v in times.items()},
                     "speedup": times["python"] / times["cython"] if "cython" in times else None,
                     "agree": agree})
    w = max(len(r["kernel"]) for r in rows)
    print(f"{'kernel'.ljust(w)}  python_s   cython_s   speedup  agree")
    for r in rows:
        cy = "-" if r.get("cython_s") is None else "%.4f" % r["cython_s"]
        sp = "-" if r["speedup"] is None else "%.1fx" % r["speedup"]
        print(f"{r['kernel'].ljust(w)}  {r['python_s']:<9.4f}  {cy:<9}  {sp:<7}  {r['agree']}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 0 if all(r["agree"] for r in rows) else 1


if __name__ == "__main__":
    raise SystemExit(main())
