import numpy as np
import pytest
from hypothesis import settings

from pliag import problems as pb
from pliag.suites import demo_lasso, demo_poisson, demo_quartic

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

# acceptance results collected while the session runs, printed at the end
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def lasso():
    return demo_lasso()


@pytest.fixture(scope="session")
def quartic():
    return demo_quartic()


@pytest.fixture(scope="session")
def poisson():
    return demo_poisson()


@pytest.fixture(scope="session")
def holder_toy():
    return pb.make_holder_toy(0.0)
