"""Build script for the optional compiled integrand kernel.

The package works without the extension (a numpy fallback is selected at
import time), so a failed compile only costs speed. Set OAMSPDC_SKIP_EXT=1
to skip building it entirely.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("OAMSPDC_SKIP_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("oamspdc.kernels._integrand_c",
                       ["src/oamspdc/kernels/_integrand_c.pyx"])],
            compiler_directives={"language_level": "3"},
        )
        for ext in ext_modules:
            ext.include_dirs.append(numpy.get_include())
            ext.define_macros.append(("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION"))
            ext.extra_compile_args.append("-O3")
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
