"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a pure-Python fallback is
selected at import time), so any build failure here downgrades to a
source-only install instead of aborting.
"""

from setuptools import Extension, setup


def _extensions() -> list:
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "ftlab._kernels",
        sources=["src/ftlab/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    try:
        return cythonize([ext], language_level="3")
    except Exception:
        return []


setup(ext_modules=_extensions())
