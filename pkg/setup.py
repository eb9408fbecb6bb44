"""Build script: compiles the optional Crank-Nicolson stepping extension.

The package works without the extension (a numpy fallback is selected at
import time), so any build failure here is downgraded to a warning.
"""

import sys

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("quadham.gridsim._cn_core",
                   ["src/quadham/gridsim/_cn_core.pyx"])],
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "language_level": "3",
        },
    )
    include_dirs = [numpy.get_include()]
    for ext in ext_modules:
        ext.include_dirs.extend(include_dirs)
except Exception as exc:  # pragma: no cover
    print(f"warning: skipping compiled extension ({exc})", file=sys.stderr)
    ext_modules = []

setup(ext_modules=ext_modules)
