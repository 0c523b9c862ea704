"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a pure numpy fallback is selected at
import time), so failure to build it is downgraded to a warning rather than a
hard error.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "trunclap._kernels",
                ["src/trunclap/_kernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - exercised only on broken toolchains
    sys.stderr.write(f"warning: building without compiled kernels ({exc})\n")

setup(ext_modules=ext_modules)
