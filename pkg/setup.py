"""Build script for the optional compiled integrator core.

The extension is marked optional: if no C compiler (or Cython) is available
the install still succeeds and the package falls back to the pure-Python
integrator at import time.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "chaintrick._core._chain_cy",
                ["src/chaintrick/_core/_chain_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
