import pytest

from seqsim.core import SimTable
from seqsim.nfa import from_strings


@pytest.fixture
def golden_table():
    return SimTable.from_rows(["a", "b"], [{"a": 0.5, "b": 0.5}, {"a": 0.0, "b": 0.0}])


@pytest.fixture
def ab_bb():
    return from_strings("ab", ["ab", "bb"])


ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


@pytest.fixture
def acceptance_log(request):
    return request.config.stash[ACCEPTANCE]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.line(line)
