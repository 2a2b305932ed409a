"""Build script for the compiled kernel extension.

The extension is optional: if Cython or a C compiler is unavailable the
package installs anyway and falls back to the pure-Python kernels at
import time (see sepnav._kernels).
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
                "sepnav._kernels._core",
                ["src/sepnav/_kernels/_core.pyx"],
                include_dirs=[np.get_include()],
                # keep separate sin/cos libm calls (no sincos combining) so
                # results match the pure-Python kernels bit for bit
                extra_compile_args=["-O3", "-fno-builtin-sin",
                                    "-fno-builtin-cos"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    sys.stderr.write(f"sepnav: skipping compiled kernels ({exc}); "
                     "pure-Python fallback will be used\n")

setup(ext_modules=ext_modules)
