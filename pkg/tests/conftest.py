import pytest

from abfix.metric import FiniteSet, Interval, builtin_space


@pytest.fixture
def abs_unit():
    return builtin_space("abs", Interval(0.0, 1.0))


@pytest.fixture
def squared_012():
    return builtin_space("abs-squared", FiniteSet((0.0, 1.0, 2.0)))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
