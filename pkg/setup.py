import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("OUTERLIP_PURE_PYTHON"):
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:  # no build toolchain: the package falls back to _pykernels
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "outerlip._ckernels",
                    ["src/outerlip/_ckernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    language="c++",
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
