"""Build script: compiles the optional Cython kernel extension.

The extension is best-effort. If Cython or a C compiler is unavailable the
package installs anyway and falls back to the pure-NumPy kernels in
``cellbench._kernels._fallback``.
"""

import warnings

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """build_ext that degrades to a warning instead of failing the install."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            warnings.warn(f"compiled kernels skipped ({exc}); using pure-Python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"compiled kernels skipped ({exc}); using pure-Python fallback")


def _extensions():
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []
    return cythonize(
        [
            Extension(
                "cellbench._kernels._core",
                ["src/cellbench/_kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )


setup(ext_modules=_extensions(), cmdclass={"build_ext": OptionalBuildExt})
