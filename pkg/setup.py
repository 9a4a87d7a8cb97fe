"""Build script for the optional compiled Chebyshev kernel.

The package is fully functional without the extension (a NumPy fallback is
selected at import time); building it just makes the fast transform faster.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "framelet_magnet._cheb_kernel",
                ["src/framelet_magnet/_cheb_kernel.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level="3",
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
