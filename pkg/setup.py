import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("AADUAL_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("aadual.kernels._core", ["src/aadual/kernels/_core.pyx"])],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except ImportError:
        # pure-Python fallback kernels are selected at import time
        ext_modules = []

setup(ext_modules=ext_modules)
