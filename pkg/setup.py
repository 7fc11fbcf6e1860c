import numpy as np
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the speedup extension when a compiler is available.

    The package works without it: netspectra.kernels falls back to the
    pure-numpy implementations at import time.
    """

    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler / headers
            print(f"warning: speedup extension not built ({exc}); "
                  f"pure-python kernels will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: {ext.name} failed to compile ({exc}); "
                  f"pure-python kernels will be used")


extensions = [
    Extension(
        "netspectra.kernels._speedups",
        ["src/netspectra/kernels/_speedups.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
    )
]

if __name__ == "__main__":
    from Cython.Build import cythonize

    setup(
        ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}),
        cmdclass={"build_ext": OptionalBuildExt},
    )
