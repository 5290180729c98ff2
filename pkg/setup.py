import os
from setuptools import setup, find_packages

this_directory = os.path.abspath(os.path.dirname(__file__))
with open(os.path.join(this_directory, "README.md"), encoding="utf-8") as f:
    long_description = f.read()

setup(
    name="slowpath",
    version="0.1.0",
    author="slowpath contributors",
    description="Temporal contrastive decoding for unified audio-language models",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(include=["slowpath", "slowpath.*"]),
    classifiers=[
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.10",
        "License :: OSI Approved :: Apache Software License",
        "Operating System :: OS Independent",
        "Environment :: Console",
        "Topic :: Scientific/Engineering :: Artificial Intelligence",
        "Topic :: Multimedia :: Sound/Audio :: Analysis",
    ],
    python_requires=">=3.10",
    entry_points={
        "console_scripts": [
            "slowpath=slowpath:main",
        ],
    },
    install_requires=[
        "PyYAML",
        "numpy",
        "scipy",
        "termcolor>=2.1.0",
    ],
)
