"""Build script: compiles the mod-p elimination kernel when a toolchain is
available; the package works without it via the pure fallback."""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("biquiver._gfelim", ["src/biquiver/_gfelim.pyx"],
                   include_dirs=[numpy.get_include()],
                   define_macros=[("NPY_NO_DEPRECATED_API",
                                   "NPY_1_7_API_VERSION")])],
        language_level=3)
except Exception as exc:  # noqa: BLE001 - any build-env gap means "skip"
    print(f"biquiver: compiled kernel skipped ({exc}); "
          "using the pure fallback", file=sys.stderr)

setup(ext_modules=ext_modules)
