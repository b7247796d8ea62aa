"""Build script: compiles the optional lattice-DP extension when Cython is available.

Set BOUNDKIT_PURE_BUILD=1 to skip the extension entirely; the package then
runs on the pure-Python kernels.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("BOUNDKIT_PURE_BUILD") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/boundkit/kernels/_speed.pyx"],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
