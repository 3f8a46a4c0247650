"""Build script: compiles the optional Cython kernel extension.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so a failed extension build only costs speed.
"""
import sys

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext = Extension(
        "dtebell._kernels._core",
        ["src/dtebell/_kernels/_core.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3", "-fopenmp"],
        extra_link_args=["-fopenmp"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    ext_modules = cythonize([ext], language_level=3)
except Exception as exc:  # pragma: no cover - build environment dependent
    sys.stderr.write(f"dtebell: skipping compiled kernels ({exc}); "
                     "the pure-numpy fallback will be used\n")

setup(ext_modules=ext_modules)
