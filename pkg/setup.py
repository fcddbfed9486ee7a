import os

from setuptools import find_packages, setup

requirements = [
    "numpy>=1.17",
    "scipy>=1.4",
]


def get_version() -> str:
    """
    Get the entswap package version.
    """
    # Technique from: https://packaging.python.org/guides/single-sourcing-package-version/
    basedir = os.path.dirname(__file__)
    module_path = os.path.join(basedir, "entswap", "__init__.py")
    with open(module_path) as infile:
        for line in infile:
            if line.startswith("__version__"):
                _, version, _ = line.split('"', 2)
                return version
    assert False, "Cannot find entswap package version"


setup(
    name="entswap",
    version=get_version(),
    zip_safe=True,
    packages=find_packages(),
    description="Entanglement purification by swapping and local filtering, verified exactly.",
    long_description="""
entswap simulates a one-shot entanglement purification protocol: two
non-maximally entangled pairs are joined by a Bell measurement on their inner
particles, and every branch that is left less than maximally entangled is
filtered locally with one ancilla.

entswap's key features are:

- Exact probability trees of every (Bell outcome, ancilla outcome) path.
- Seeded, reproducible Monte Carlo sampling of the same tree.
- An independent brute-force 5-qubit oracle for cross-checking.
- Parameter sweeps as CSV and a self-verification command.
    """,
    scripts=["bin/entswap"],
    include_package_data=True,
    python_requires=">= 3.7",
    install_requires=requirements,
)
