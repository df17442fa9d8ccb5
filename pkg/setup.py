"""Build script for the optional compiled kernel extension.

The package works without the extension (a pure-Python twin of the kernels
is selected at import time), so the build degrades gracefully when Cython
or a C compiler is unavailable.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "pwave._kernels",
                ["src/pwave/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
