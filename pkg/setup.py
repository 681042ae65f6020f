"""Build hook for the optional compiled matcher kernel.

The package is pure Python except for provbench.matching._speedups, a
Cython translation of the backtracking search kernel.  Its absence is
tolerated at runtime (a pure Python kernel is selected instead), so the
extension is marked optional: installation succeeds without a C
toolchain.
"""

import os

from setuptools import Extension, setup

_PYX = "src/provbench/matching/_speedups.pyx"

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    if os.path.exists(_PYX):
        ext_modules = cythonize(
            [Extension("provbench.matching._speedups", [_PYX], optional=True)],
            language_level=3,
        )
    else:
        ext_modules = []

setup(ext_modules=ext_modules)
