"""Build script: compiles the optional polynomial kernel extension.

The package is fully functional without the extension (a pure-Python
kernel is selected at import time); the compiled kernel only speeds up
the exact-arithmetic certification.  Any build failure is therefore
downgraded to a warning.
"""
import warnings

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/abiwave/symbolic/_kernel.pyx"],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    warnings.warn(f"building without compiled kernel: {exc}")

setup(ext_modules=ext_modules)
