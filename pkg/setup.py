import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
    ext_modules = cythonize(
        [Extension("nvgatesim._kernel", ["src/nvgatesim/_kernel.pyx"],
                   extra_compile_args=["-O3", "-ffast-math", "-march=native"])],
        compiler_directives={"language_level": 3},
    )
except ImportError:
    # Pure-Python install still works; the numpy fallback kernel is used.
    ext_modules = []

setup(
    ext_modules=ext_modules,
    include_dirs=[numpy.get_include()],
)
