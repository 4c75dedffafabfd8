from fractions import Fraction

import pytest

from selfaffine import fixtures
from selfaffine.intlinalg import certify_expanding

ACCEPTANCE_LINES: list[str] = []


def rational_solve(a, b):
    """Independent Gaussian elimination over Q, used as an oracle."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(a, b)]
    for c in range(n):
        p = next(i for i in range(c, n) if m[i][c] != 0)
        m[c], m[p] = m[p], m[c]
        for i in range(n):
            if i != c:
                f = m[i][c] / m[c][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return [m[i][n] / m[i][i] for i in range(n)]


def in_lattice(a, x) -> bool:
    """Whether x lies in A Z^d."""
    return all(v.denominator == 1 for v in rational_solve(a, x))


@pytest.fixture
def F1():
    return fixtures.f1()


@pytest.fixture
def F2():
    return fixtures.f2()


@pytest.fixture
def fig1_osc():
    return fixtures.fig1_osc()


@pytest.fixture
def fig1_overlap():
    return fixtures.fig1_overlap()


@pytest.fixture
def triadic():
    return certify_expanding([[3]])


@pytest.fixture
def fivefold():
    return certify_expanding([[1, -2], [2, 1]])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
