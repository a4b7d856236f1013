"""Optional compiled build of the hot modules.

The modules are plain Python; when Cython and a C compiler are available
they are compiled as-is for speed, otherwise the pure-Python sources are
used. Set CDICT_PURE_PYTHON=1 to skip compilation.
"""
import os

from setuptools import Extension, setup

COMPILED = ["core", "jsonio"]


def extensions():
    if os.environ.get("CDICT_PURE_PYTHON"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    exts = [Extension(f"cdict.{name}", [f"src/cdict/{name}.py"], optional=True) for name in COMPILED]
    return cythonize(exts, language_level=3, build_dir="build/cython", quiet=True)


setup(ext_modules=extensions())
