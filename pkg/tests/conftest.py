import numpy as np
import pytest

from metatfr.grid import Grid, hermite


@pytest.fixture(scope="session")
def grid64():
    return Grid(64)


@pytest.fixture(scope="session")
def grid128():
    return Grid(128)


@pytest.fixture(scope="session")
def hermites128(grid128):
    return [hermite(n, grid128) for n in range(9)]


@pytest.fixture(scope="session")
def hermites64(grid64):
    return [hermite(n, grid64) for n in range(5)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
