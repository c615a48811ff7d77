"""Build script: compiles the coordinate-descent kernel when Cython and a C
compiler are available. The package works without it (pure-numpy fallback is
selected at import), so a failed extension build is downgraded to a warning.
"""

import warnings

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    ext_modules = cythonize(
        [
            Extension(
                "textlogit._kernels._cdkernel",
                ["src/textlogit/_kernels/_cdkernel.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": 3},
    )
except ImportError:
    warnings.warn(
        "Cython or numpy not available at build time; installing with the "
        "pure-python coordinate descent backend only."
    )

setup(ext_modules=ext_modules)
