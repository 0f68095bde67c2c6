import os

from setuptools import setup

ext_modules = []
# the modular elimination loops vectorize at -O3 without FP trap semantics (rounding is
# unchanged); DYNQ_PORTABLE=1 skips CPU-specific code
compile_args = ["-O3", "-fno-trapping-math"] + ([] if os.environ.get("DYNQ_PORTABLE") else ["-march=native"])
if not os.environ.get("DYNQ_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("dynq._ckernels", ["src/dynq/_ckernels.pyx"],
                       include_dirs=[numpy.get_include(), "src/dynq"],
                       define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                       extra_compile_args=compile_args)],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
