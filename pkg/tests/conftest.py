import pytest

from ergm_exact.graphspace import realizable_set

TRI3 = ("triangles", "edges", "mean_degree")


@pytest.fixture(scope="session")
def tri3():
    return realizable_set(3, TRI3)


@pytest.fixture(scope="session")
def edges3():
    return realizable_set(3, ["edges"])


ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


@pytest.fixture
def acceptance_log(pytestconfig):
    return pytestconfig.stash[ACCEPTANCE]


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
