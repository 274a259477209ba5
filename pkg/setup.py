"""Build script for the optional compiled kernels.

The package works without the extension (a numpy fallback is selected at
import time); set GWOLF_NO_EXT=1 to skip the build entirely.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("GWOLF_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "gwolf._kernels",
                    ["src/gwolf/_kernels.pyx"],
                    # -ffp-contract=off: the fallback backend must produce
                    # bit-identical doubles, so FMA contraction is disabled.
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                    optional=True,
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
