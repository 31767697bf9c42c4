import os
import subprocess
import sys

import numpy as np
import pytest

from kp5 import kernels

compiled = pytest.mark.skipif(kernels.BACKEND != "cython", reason="compiled kernels not built")


def test_fallback_selected_by_env():
    env = dict(os.environ, KP5_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import kp5; print(kp5.BACKEND)"],
                         capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "python"


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.backend("fortran")


@compiled
def test_identity_sweep_agrees():
    assert kernels.identity_sweep(10, 10, impl="python") == kernels.identity_sweep(10, 10, impl="cython")


@compiled
@pytest.mark.parametrize("args", [(7, -3, 11, 0, 7 * 10**6, -2000, 2000), (-2, 5, 1, -50, 50, -100, 100),
                                  (1, 0, 0, 0, 100, -20, 20)])
def test_parabola_count_agrees(args):
    assert kernels.parabola_brute_count(*args, impl="python") == kernels.parabola_brute_count(*args, impl="cython")


def test_parabola_count_exact_python_path():
    # coefficients beyond int64 headroom fall back to Python integers
    A = 10**12
    assert kernels.parabola_brute_count(A, 0, 0, 0, A * 4, -5, 5) == 5


def test_identity_sweep_object_path():
    from kp5 import _kernels_py
    exact = _kernels_py.identity_sweep(4, 6, dtype=object)
    assert exact == _kernels_py.identity_sweep(4, 6)
    assert exact[1] == exact[2] == 0
    assert kernels.identity_sweep_bound(40, 40) < 2**62 <= kernels.identity_sweep_bound(2000, 10**6)


@compiled
def test_conv_accumulate_agrees(rng):
    from kp5.verifier.blocks import convolve_onto, random_block_uniform, restriction_targets
    f1 = random_block_uniform(rng, 2, 32, (-6, 6))
    f2 = random_block_uniform(rng, 4, 32, (-6, 6))
    targets, pairs = restriction_targets(f1, f2, 4, 64)
    a = convolve_onto(f1, f2, targets, pairs, impl="python")
    b = convolve_onto(f1, f2, targets, pairs, impl="cython")
    c = convolve_onto(f1, f2, targets, pairs)
    assert np.allclose(a, b, rtol=1e-13, atol=0) and np.allclose(a, c, rtol=1e-13, atol=0)
