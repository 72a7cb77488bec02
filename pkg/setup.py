import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # No Cython: install pure-Python only, opspace.kernels falls back at import.
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "opspace._kernels_cy",
                ["src/opspace/_kernels_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
