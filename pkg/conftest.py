"""Shared fixtures for the multihead test suite."""

from fractions import Fraction
from pathlib import Path
from textwrap import dedent

import pytest

from multihead.automata import parse_machine
from multihead.ips import HeadClassification, Mode, build_verifier

FIXTURES = Path(__file__).parent / "fixtures"


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: exhaustive sweeps that take more than a few seconds")


def machine_from(text: str):
    return parse_machine(dedent(text))


def load_fixture(name: str):
    return parse_machine((FIXTURES / f"{name}.mhfa").read_text())


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def anbn():
    return load_fixture("anbn")


@pytest.fixture(scope="session")
def anbn_1():
    return load_fixture("anbn_1")


@pytest.fixture(scope="session")
def anbn_2():
    return load_fixture("anbn_2")


@pytest.fixture(scope="session")
def stay_loop():
    return load_fixture("stay_loop")


@pytest.fixture(scope="session")
def split():
    """Head 2 of anbn is safe, head 1 is risky."""
    return HeadClassification(safe=(2,), risky=(1,))


@pytest.fixture(scope="session")
def gb(anbn, split):
    return build_verifier(anbn, split, Mode.GB, 2, Fraction(1, 4))
