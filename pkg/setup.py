"""Builds the optional compiled coverability kernel.

If Cython or a C compiler is missing the package still installs and falls
back to the pure-Python kernel at import time.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/regsep/_basis.pyx"], compiler_directives={"language_level": "3"}, quiet=True
    )
except Exception as exc:  # noqa: BLE001 - any failure means "no extension"
    print(f"building without the compiled kernel: {exc}")

setup(ext_modules=ext_modules)
