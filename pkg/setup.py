from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # Pure-Python install: constlab falls back to the numpy kernels at import.
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("constlab._kernels", ["src/constlab/_kernels.pyx"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
