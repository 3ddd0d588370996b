"""Build script for the optional compiled spectrum kernels.

The library is pure Python plus one Cython extension.  When the extension
cannot be built (no compiler, no Cython) the install still succeeds and the
package falls back to the vectorized numpy kernels at import time.
"""

import os

from setuptools import setup
from setuptools.extension import Extension

ext_modules = []
if os.environ.get("RISLOC_SKIP_BUILD_EXT") != "1":
    try:
        from Cython.Build import cythonize

        # -fcx-limited-range drops the C99 Annex G inf/nan fixup call around
        # every complex multiply; the kernels only ever see finite values
        ext = Extension(
            "risloc._kernels",
            sources=["src/risloc/_kernels.pyx"],
            extra_compile_args=["-O3", "-fcx-limited-range"],
        )
        ext.optional = True
        ext_modules = cythonize([ext], language_level="3")
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
