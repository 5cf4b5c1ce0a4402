from setuptools import setup, find_packages
import sys
from pathlib import Path

# Add the package directory to Python path to import version
sys.path.insert(0, str(Path(__file__).parent / "khtorsion"))
from _version import __version__

setup(
    name="khtorsion",
    version=__version__,
    description="Lee-deformed Khovanov homology over F_p[x], torsion orders and knot cobordism maps",
    packages=find_packages(exclude=["examples", "examples.*"]),
    package_data={
        "khtorsion": ["data/*.yaml", "corpus/*.json"],
    },
    install_requires=[
        "PyYAML>=5.1",
        "sympy>=1.12",
    ],
    extras_require={
        "test": ["pytest>=7"],
    },
    python_requires=">=3.8",
    entry_points={
        'console_scripts': [
            'khtorsion=khtorsion.main:main',
        ],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
)
