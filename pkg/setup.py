from setuptools import Extension, setup
from Cython.Build import cythonize
import numpy as np

extensions = cythonize(
    [
        Extension(
            "hbtsim._sweep",
            ["src/hbtsim/_sweep.pyx"],
            include_dirs=[np.get_include()],
            extra_compile_args=["-O3"],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        )
    ],
    compiler_directives={
        "language_level": "3",
        "boundscheck": False,
        "wraparound": False,
        "cdivision": True,
        "nonecheck": False,
    },
)

setup(ext_modules=extensions)
