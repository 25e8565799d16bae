"""Build hook for the optional compiled kernel.

The package is pure Python except for ``metalg._kernels._ckern``, a small
Cython module holding the hot inner loops (metric closure, axiom scan,
valuation enumeration, non-expansiveness scan).  The extension is marked
optional: if it cannot be built or imported, the package falls back to the
pure-Python twin ``metalg._kernels._pykern`` at import time.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "metalg._kernels._ckern",
                ["src/metalg/_kernels/_ckern.pyx"],
                optional=True,
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
