"""Build script for the optional compiled kernels.

The Cython extension ``carleson_cex._kernels`` is built when Cython and numpy
are available at build time.  When the build is impossible the package still
installs and falls back to the numpy kernels at import time.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("CARLESON_CEX_NO_EXT", "") not in ("1", "true", "yes"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:  # pragma: no cover - build-time only
        print("Cython/numpy unavailable: installing the pure-Python kernels only")
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "carleson_cex._kernels",
                    ["src/carleson_cex/_kernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                    libraries=["m"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
