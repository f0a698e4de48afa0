"""Builds the optional compiled kernel for consecutive-pair expansion.

The package works without the extension (a pure-Python kernel is selected
at import time); set STARSTAR_NO_EXT=1 to skip compilation entirely.
"""

import os

from setuptools import Extension, setup

extensions = []
if not os.environ.get("STARSTAR_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize

        extensions = cythonize(
            [
                Extension(
                    "starstar._kernels_cy",
                    ["src/starstar/_kernels_cy.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
            },
        )
    except ImportError:
        extensions = []

setup(ext_modules=extensions)
