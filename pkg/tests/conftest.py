from fractions import Fraction

import pytest
from helpers import SIX_NODE, TWO_NODE

from mcbop import simple_measure


@pytest.fixture
def two_node():
    return simple_measure(*TWO_NODE)


@pytest.fixture
def two_node_t1():
    return simple_measure(*TWO_NODE, flow="t1")


@pytest.fixture
def six_node_t1():
    return simple_measure(*SIX_NODE, flow="t1")


@pytest.fixture
def p2_measure():
    return simple_measure(
        [1, 2, Fraction(1, 2), 3],
        [[[2, 1], [1, 1]], [[1, 0], [0, 2]], [[3, 1], [1, 2]], [[1, -1], [-1, 3]]],
        flow="t1",
    )


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.LINES:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.LINES:
            terminalreporter.write_line(line)
