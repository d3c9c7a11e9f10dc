from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("amplikit._kernels.core", ["src/amplikit/_kernels/core.pyx"])],
        language_level="3",
    )
except ImportError:
    # Pure-numpy fallback is selected at import time, so building without
    # Cython still yields a working package.
    ext_modules = []

setup(ext_modules=ext_modules)
