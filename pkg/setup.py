"""Build hook for the compiled kernel extension.

The package works without the extension (a pure-Python lane is selected at
import time), so a failed compile is not fatal for development installs:
    TXT2VID_SKIP_EXT=1 pip install -e . --no-build-isolation
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("TXT2VID_SKIP_EXT"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("txt2vid._kernels", ["src/txt2vid/_kernels.pyx"])],
        language_level="3",
    )

setup(ext_modules=ext_modules)
