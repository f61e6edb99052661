import pytest

from drinlog.drinfeld_core import DrinfeldModule
from drinlog.local_field import WorkingField


@pytest.fixture(scope="session")
def W2():
    return WorkingField.preset("q2")


@pytest.fixture(scope="session")
def W2wide():
    return WorkingField.preset("q2-wide")


@pytest.fixture(scope="session")
def W3():
    return WorkingField.preset("q3")


@pytest.fixture(scope="session")
def carlitz2(W2):
    return DrinfeldModule.carlitz(W2)


@pytest.fixture(scope="session")
def rank2(W2):
    # kappa entries are 4th powers so every Frobenius root exists
    return DrinfeldModule(W2, [W2.parse("(1 + theta^-1)^4"), W2.theta**4])


_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def acceptance_log(pytestconfig):
    return pytestconfig.stash[_ACCEPTANCE]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
