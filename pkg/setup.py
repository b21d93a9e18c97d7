from pathlib import Path

from setuptools import find_packages, setup

long_description = Path("README.md").read_text().strip()

setup(
    name="snrgsim",
    version="0.1.0",
    description="Selective noise resistant gate simulator",
    long_description=long_description,
    long_description_content_type="text/markdown",
    license="LGPLv3",
    packages=find_packages(exclude=["tests"]),
    package_data={"snrgsim": ["data/configs/*.ini"]},
    python_requires=">=3.8",
    install_requires=[
        "appdirs",
        "numpy",
        "pandas>=1.5",
        "ray",
        "tabulate",
        "tqdm",
    ],
    extras_require={
        "dev": [
            "black",
            "bump2version",
            "isort",
            "mypy",
            "pytest-cov",
            "pytest-mock",
            "pytest-xdist",
            "pytest",
            "scipy",
        ],
        "jupyter": ["jupyter", "jupytext"],
    },
    entry_points={"console_scripts": ["snrgsim=snrgsim.cli:main"]},
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: GNU Lesser General Public License v3 (LGPLv3)",
        "Natural Language :: English",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3 :: Only",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Physics",
        "Topic :: Scientific/Engineering",
    ],
    keywords=[
        "spin qubit",
        "NV center",
        "dynamical decoupling",
        "XY-8",
        "Ornstein-Uhlenbeck noise",
        "Monte Carlo",
        "quantum control",
    ],
)
