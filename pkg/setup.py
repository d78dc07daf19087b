from setuptools import setup, find_packages

setup(
    name="multihead",
    version="0.1.0",
    packages=find_packages(include=["multihead", "multihead.*"]),
    install_requires=[
        "networkx>=3.0",
        "tomli>=1.1; python_version < '3.11'",
    ],
    extras_require={
        "test": [
            "pytest>=7.0",
            "hypothesis>=6.0",
        ],
    },
    entry_points={
        "console_scripts": [
            "multihead=multihead.cli:main",
        ],
    },
    python_requires=">=3.10",
    author="User",
    description="Multi-head two-way automata, safe-head analysis and constant-randomness verifiers",
)
