import sys

import pytest

from tfs import bundled_signature


@pytest.fixture(scope="session")
def rho():
    return bundled_signature("rho")


@pytest.fixture(scope="session")
def inv():
    return bundled_signature("inv")


@pytest.fixture(scope="session")
def rho2():
    return bundled_signature("rho2")


def pytest_terminal_summary(terminalreporter):
    results = getattr(sys.modules.get("test_acceptance"), "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
