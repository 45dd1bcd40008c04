import numpy as np
import pytest

from driftsearch.grid import Domain, GridSpec


@pytest.fixture
def square():
    return Domain(0.0, 100.0, 0.0, 100.0)


@pytest.fixture
def rect_grid():
    return GridSpec(Domain(0.0, 40.0, 0.0, 20.0), 40, 20)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = []


@pytest.fixture
def report():
    """Record one acceptance line: ``report(number, passed, detail)``."""
    def _report(number, passed, detail):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        return passed
    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
