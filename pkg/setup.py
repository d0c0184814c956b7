"""Builds the optional compiled kernels; the package works without them."""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # numpy fallback kernels are selected at import
    setup()
else:
    setup(
        ext_modules=cythonize(
            [Extension("qwqram._ckernels", ["src/qwqram/_ckernels.pyx"], extra_compile_args=["-O3"])],
            compiler_directives={"language_level": 3, "embedsignature": True},
        )
    )
