from setuptools import setup

with open("README.md", "r") as file:
    long_description = file.read()

setup(
    name="phinabla",
    version="0.1.0",
    description="Exact truncated-precision checks for φ-modules and (φ,∇)-modules over the Robba ring",
    long_description=long_description,
    long_description_content_type="text/markdown",
    license="MIT",
    package_dir={'phinabla': 'phinabla'},
    packages=['phinabla'],
    install_requires=[
        "sympy>=1.12",
        "PyYAML>=6.0",
        "rich>=13.5",
    ],
    entry_points={
        "console_scripts": ["phinabla=phinabla.cli:main"],
    },
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.8",
)
