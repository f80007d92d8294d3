import os

from setuptools import Extension, setup

# The compiled kernel is optional: without a C toolchain the package falls
# back to the pure-Python kernel selected at import time.
ext_modules = []
if not os.environ.get("AUVSIM_SKIP_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("auvsim.core._kernel", ["src/auvsim/core/_kernel.pyx"])],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
