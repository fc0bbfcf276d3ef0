"""Build script.

The compiled kernel module is optional: when Cython or a C compiler is
missing the install falls through to the pure-numpy backend and the
package works unchanged (see gdppca._backend).
"""

import os

from setuptools import setup

ext_modules = []
try:
    if not os.path.exists("src/gdppca/_kernels.pyx"):
        raise ImportError
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "gdppca._kernels",
                sources=["src/gdppca/_kernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
