"""Build script for the optional compiled kernel extension.

The package is fully functional without a compiler: if Cython is not
available (or compilation fails) the install proceeds and the pure
NumPy kernels in ``spherebound._kernels._pykern`` are used instead.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "spherebound._kernels._ckern",
                ["src/spherebound/_kernels/_ckern.pyx"],
                # -ffp-contract=off keeps the compiled kernels bitwise
                # identical to the NumPy fallback (no FMA contraction).
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
