
from setuptools import setup, find_packages
from compamg.version import __version__


# Utility function to read the README file.
with open("README.md") as infile:
    content = infile.read().rstrip()

setup(
	name = "compamg",
	version = __version__,
	author = "compamg developers",
	description = ("Adaptive composite algebraic multigrid preconditioners built"
											" with modularity matching smoothed aggregation."),
	license = "MIT License",
	keywords = "algebraic multigrid, sparse linear solvers, preconditioning",
	packages=find_packages(exclude=["tests"]),
    
    long_description = content,
	classifiers = [
	"Development Status :: 3 - Alpha",
	"Intended Audience :: Science/Research",
	"Intended Audience :: Developers",
	"License :: OSI Approved :: MIT License",
	"Programming Language :: Python :: 3",
	"Topic :: Software Development",
	"Topic :: Scientific/Engineering :: Mathematics",
	"Operating System :: POSIX",
	"Operating System :: Unix",
	"Operating System :: MacOS",
	],
    entry_points={'console_scripts': ['compamg = compamg.compamg:main']},
	install_requires = ["numpy>=1.17", "scipy>=1.4", "pandas>=1.0", "networkx>=2.4"],
    extras_require = {"tests": ["pytest>=6.0"]},
    python_requires=">=3.7",
)
