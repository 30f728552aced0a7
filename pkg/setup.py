from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install
    pass
else:
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("qbt._kernels", ["src/qbt/_kernels.pyx"], extra_compile_args=["-O2"])],
        language_level=3,
    )

setup(ext_modules=ext_modules)
