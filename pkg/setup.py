"""Build script: compiles the play kernels when Cython and a C compiler exist.

Installation still succeeds without them; the package then runs on its
pure-Python kernels.
"""
import os
import sys

from setuptools import setup

ext_modules = []
if os.environ.get("PLAYHYST_NO_EXT", "") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        openmp = [] if sys.platform == "darwin" else ["-fopenmp"]
        ext_modules = cythonize(
            [Extension(
                "playhyst._kernels",
                ["src/playhyst/_kernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"] + openmp,
                extra_link_args=openmp,
            )],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
