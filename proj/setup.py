"""Builds the compiled extension into the ncd package.

The CMake build produces the same module for development and testing; this
setup script exists so the package can also be installed straight from the
source tree with pip.
"""

import os
from glob import glob
from pathlib import Path

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup


def eigen_include_dir():
    candidates = [
        os.environ.get("EIGEN3_INCLUDE_DIR"),
        "/usr/include/eigen3",
        "/usr/local/include/eigen3",
    ]
    for candidate in candidates:
        if candidate and Path(candidate, "Eigen", "Core").exists():
            return candidate
    raise RuntimeError(
        "Eigen headers not found; set EIGEN3_INCLUDE_DIR to the directory "
        "containing Eigen/Core"
    )


extension = Pybind11Extension(
    "ncd._ncd",
    sources=["bindings/py_core.cpp", *sorted(glob("src/*.cpp"))],
    include_dirs=["include", "vendor", eigen_include_dir()],
    cxx_std=20,
)

setup(ext_modules=[extension], cmdclass={"build_ext": build_ext})
