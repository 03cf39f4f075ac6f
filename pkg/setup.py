"""Build script: compiles the optional Cython step-execution kernel.

The package works without the extension; sfverify.kernel falls back to the
pure-Python VM when the compiled module is missing or SFVERIFY_PURE=1.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("SFVERIFY_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/sfverify/kernel/_kernel_c.pyx"],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
