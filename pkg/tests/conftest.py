import pytest

from smsc.families import WeightedCoverage
from smsc.setfn import from_callable


def squared_size(n):
    return from_callable(n, lambda S: bin(S).count("1") ** 2, kind="cost")


@pytest.fixture
def toy():
    """Sets A={1,2}, B={2,3}, C={4} over unit-weight atoms; cost |S|^2."""
    f = WeightedCoverage([1, 1, 1, 1], [[0, 1], [1, 2], [3]], labels=["A", "B", "C"])
    return f, squared_size(3)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
