import os

from setuptools import Extension, setup

# The compiled kernel core is optional: without Cython (or a C compiler) the
# package still installs and runs on the pure-Python twin selected at import.
# -ffp-contract=off keeps the C arithmetic bit-identical to the Python twin
# (no fused multiply-add contraction).
ext_modules = []
if os.environ.get("RELAYTUNE_PURE") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "relaytune._loops_c",
                    ["src/relaytune/_loops_c.pyx"],
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
