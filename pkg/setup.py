import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; iplab falls back to _pykernels
    cythonize = None

ext_modules = []
if cythonize is not None and not os.environ.get("IPLAB_NO_EXT"):
    ext_modules = cythonize(
        [
            Extension(
                "iplab._kernels",
                ["src/iplab/_kernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3", "-march=native"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
