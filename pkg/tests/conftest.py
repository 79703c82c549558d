import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gridcon.datasets import build_ieee14, build_ieee118  # noqa: E402
from gridcon.entities import parse_token  # noqa: E402


@pytest.fixture(scope="session")
def net14():
    return build_ieee14()


@pytest.fixture(scope="session")
def net118():
    return build_ieee118()


@pytest.fixture(scope="session")
def net14_p12(net14):
    return net14.with_states({parse_token("P12"): 0})


@pytest.fixture
def tok():
    return parse_token


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
