import os

from setuptools import Extension, setup

# The compiled kernel core is optional: if Cython (or a C compiler) is not
# available the package falls back to the pure-Python backend at import time.
ext_modules = []
if os.environ.get("YMQM_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("ymqm._polycore", ["src/ymqm/_polycore.pyx"])],
            language_level=3,
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
