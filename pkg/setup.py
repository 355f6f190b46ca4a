"""Builds the optional compiled event-loop kernel.

The package works without it (a pure-Python kernel with the identical RNG
stream is selected at import time); compiling just makes the discrete-event
simulator an order of magnitude faster.  Build in place with:

    python setup.py build_ext --inplace
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "femtonet._deskernel",
                ["src/femtonet/_deskernel.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
