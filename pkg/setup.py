import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "vowelmark._smo_cy",
                ["src/vowelmark/_smo_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    # No Cython: the package falls back to the pure-numpy solver at import.
    ext_modules = []

setup(ext_modules=ext_modules)
