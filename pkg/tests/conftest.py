import numpy as np
import pytest
from hypothesis import settings

from shmww.params import PARA1, PARA2, SMALL, TOY
from shmww.scheme import keygen

# one core is shared with long-running trials; wall-clock deadlines only add noise
settings.register_profile("default", deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def toy_keys():
    return keygen(TOY, b"toy-fixture")


@pytest.fixture(scope="session")
def small_keys():
    return keygen(SMALL, b"small-fixture")


@pytest.fixture(scope="session")
def para1_keys():
    return keygen(PARA1, b"para1-fixture")


@pytest.fixture(scope="session")
def para2_keys():
    return keygen(PARA2, b"para2-fixture")


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
