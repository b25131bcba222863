"""Build script: compiles the Cython simulation kernel when possible.

The package works without the compiled extension (a pure-Python kernel is
selected at import time), so a failed extension build is not fatal.
"""

from setuptools import setup

try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/aoiharvest/_simcore.pyx",
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )
    include_dirs = [np.get_include()]
except ImportError:
    ext_modules = []
    include_dirs = []

setup(ext_modules=ext_modules, include_dirs=include_dirs)
