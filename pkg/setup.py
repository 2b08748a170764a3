"""Build script: compiles the optional Cython kernels.

The compiled module liqscreen._kernels is a performance twin of
liqscreen._kernels_py; if compilation fails the package still works
through the pure-Python fallback selected at import time.
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Never let a failed extension build fail the install."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler, broken toolchain
            print(f"skipping compiled kernels: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"skipping {ext.name}: {exc}")


def make_extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "liqscreen._kernels",
        ["src/liqscreen/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=make_extensions(), cmdclass={"build_ext": OptionalBuildExt})
