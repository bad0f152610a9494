"""
Copyright (c) fenchel-nec contributors.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
"""
import os
from setuptools import find_packages, setup

ROOT = os.path.abspath(os.path.dirname(__file__))


def read_version():
    data = {}
    path = os.path.join(ROOT, "fenchel", "_version.py")
    with open(path, "r", encoding="utf-8") as f:
        exec(f.read(), data)
    return data["__version__"]


def read_long_description():
    path = os.path.join(ROOT, "README.md")
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    return text


setup(
    name="fenchel-nec",
    version=read_version(),
    description="Certificates for torsion-free normal subgroups of NEC groups containing orientation-reversing elements",
    long_description=read_long_description(),
    long_description_content_type="text/markdown",
    license="MIT",
    packages=find_packages(
        exclude=[
            "tests",
            "examples",
        ]
    ),
    package_data={"fenchel": ["data/lookup.json", "data/defaults.yaml"]},
    py_modules=["certify"],
    python_requires=">=3.9",
    install_requires=[
        "sympy>=1.9",
        "numpy",
        "orjson",
        "sconf>=0.2.3",
        "tqdm",
        "Pebble",
    ],
    extras_require={
        "test": [
            "pytest",
            "hypothesis",
        ],
    },
    entry_points={
        "console_scripts": [
            "fenchel = certify:main",
        ],
    },
    classifiers=[
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
)
