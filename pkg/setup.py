"""Build script: compiles the optional pair-statistics kernel.

The package works without the extension (rulepick.kernels falls back to the
numpy implementation), so a missing compiler or Cython only costs speed.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "rulepick._pairstats",
                ["src/rulepick/_pairstats.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:  # pragma: no cover - exercised only on minimal toolchains
    extensions = []

setup(ext_modules=extensions)
