from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; linalg falls back to _rank_py
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("mnlck._rank_ext", sources=["src/mnlck/_rank_ext.pyx"], extra_compile_args=["-O3"])],
        language_level=3,
    )

setup(ext_modules=ext_modules)
