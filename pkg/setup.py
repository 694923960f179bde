"""Build the optional compiled kernels.

The package works without them: ``fractoback._core`` falls back to the
pure-Python implementations when the extension modules are missing.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("FRACTOBACK_NO_EXT", "") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        extensions = [
            Extension(
                "fractoback._core._series",
                ["src/fractoback/_core/_series.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            ),
            Extension(
                "fractoback._core._l1",
                ["src/fractoback/_core/_l1.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            ),
        ]
        ext_modules = cythonize(
            extensions,
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
