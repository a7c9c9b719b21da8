import pytest

from focusft.corpus import make_corpus, reference_grids
from focusft.entropy import EntropyConfig
from focusft.windows import gaussian_window, hann_window


@pytest.fixture(scope="session")
def grids():
    return reference_grids()


@pytest.fixture(scope="session")
def corpus(grids):
    return make_corpus(grids.x)


@pytest.fixture(scope="session")
def gauss():
    return gaussian_window(1.0)


@pytest.fixture(scope="session")
def hann():
    return hann_window(2.0)


@pytest.fixture(scope="session", params=["gaussian", "hann"])
def window(request, gauss, hann):
    return gauss if request.param == "gaussian" else hann


@pytest.fixture(scope="session")
def config():
    return EntropyConfig()


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
