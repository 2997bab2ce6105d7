"""Build the optional compiled secular-equation kernel.

The extension is marked optional: if Cython or a C compiler is missing the
package still installs and falls back to the NumPy implementation.
"""
import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "oscequil._secular_ext",
                ["src/oscequil/_secular_ext.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
