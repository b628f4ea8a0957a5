# Builds the optional compiled kernel module. The package is fully functional
# without it (stataudit.core falls back to the pure-Python kernels), so any
# failure here downgrades to a plain install instead of aborting.
import os
import sys

from setuptools import setup

ext_modules = []
if os.environ.get("STATAUDIT_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext = Extension(
            "stataudit.core._kernels_c",
            sources=["src/stataudit/core/_kernels_c.pyx"],
            extra_compile_args=["-O3"],
        )
        ext_modules = cythonize(
            [ext],
            language_level=3,
            annotate=False,
        )
    except Exception as exc:  # Cython missing or misconfigured toolchain
        sys.stderr.write(
            "stataudit: skipping compiled kernels (%s); "
            "pure-Python backend will be used\n" % exc
        )
        ext_modules = []

setup(ext_modules=ext_modules)
