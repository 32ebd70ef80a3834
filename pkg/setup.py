from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# -ffp-contract=off keeps the compiled simplex bit-identical to the pure
# Python mirror (no FMA contraction).
extensions = [
    Extension(
        "mband._kernels",
        ["src/mband/_kernels.pyx"],
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
]

setup(
    ext_modules=(
        cythonize(extensions, compiler_directives={"language_level": "3"})
        if cythonize is not None
        else []
    )
)
