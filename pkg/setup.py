import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if os.environ.get("KP5_NO_EXT", "") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:  # pure-Python install, kernels fall back at import
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "kp5._kernels",
                    ["src/kp5/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
        )

setup(ext_modules=ext_modules)
