"""CMake-driven build of the sfsim._core extension module.

CMakeLists.txt is the single source of truth for compiler flags and link
dependencies; this shim only points setuptools' build_ext at it (the
usual CMakeExtension pattern). Build with
``pip install -e . --no-build-isolation``.
"""

import os
import subprocess
import sys
from pathlib import Path

import pybind11
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name: str, sourcedir: str = "") -> None:
        super().__init__(name, sources=[])
        self.sourcedir = str(Path(sourcedir).resolve())


class CMakeBuild(build_ext):
    def build_extension(self, ext: CMakeExtension) -> None:
        extdir = Path(self.get_ext_fullpath(ext.name)).parent.resolve()
        build_temp = Path(self.build_temp) / ext.name
        build_temp.mkdir(parents=True, exist_ok=True)

        configure = [
            "cmake",
            ext.sourcedir,
            f"-DCMAKE_LIBRARY_OUTPUT_DIRECTORY={extdir}{os.sep}",
            f"-DPython_EXECUTABLE={sys.executable}",
            "-DCMAKE_BUILD_TYPE=Release",
            "-DSFSIM_BUILD_PYTHON=ON",
            "-DSFSIM_BUILD_TESTS=OFF",
            "-DSFSIM_BUILD_CLI=OFF",
            f"-Dpybind11_DIR={pybind11.get_cmake_dir()}",
        ]
        subprocess.run(configure, cwd=build_temp, check=True)
        subprocess.run(
            ["cmake", "--build", ".", "--parallel", "--target", "_core"],
            cwd=build_temp,
            check=True,
        )


setup(
    ext_modules=[CMakeExtension("sfsim._core")],
    cmdclass={"build_ext": CMakeBuild},
)
