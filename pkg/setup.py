from setuptools import setup
from Cython.Build import cythonize

setup(
    ext_modules=cythonize(
        ["src/irsa/_peelcore.pyx"],
        language_level=3,
    ),
)
