"""Build the optional compiled kernels.

The package works without them; if Cython or a compiler is missing the
extension is skipped and the pure-Python kernels are used.
"""

import os
import platform

from setuptools import setup

# hardware popcount; without it __builtin_popcountll is a library call
ARCH_FLAGS = ["-mpopcnt"] if platform.machine().lower() in ("x86_64", "amd64") else []

ext_modules = []
if not os.environ.get("IK2TREE_NO_EXTENSION"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("ik2tree._kernels", ["src/ik2tree/_kernels.pyx"],
                       include_dirs=[numpy.get_include()],
                       extra_compile_args=["-O3", "-std=c++17", *ARCH_FLAGS],
                       language="c++")],
            compiler_directives={"language_level": 3},
        )

setup(ext_modules=ext_modules)
