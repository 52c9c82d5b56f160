import pytest

from gaugesieve.geometry import CenteredPolytope
from gaugesieve.lattice import LatticeBasis


@pytest.fixture
def cube2():
    return CenteredPolytope.box([-1, -1], [1, 1])


@pytest.fixture
def skew2():
    return CenteredPolytope.box([-1, -1], [2, 2])


@pytest.fixture
def z2():
    return LatticeBasis.identity(2)


ACCEPTANCE_LINES = []


def record_acceptance(number: int, passed: bool, detail: str):
    line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
