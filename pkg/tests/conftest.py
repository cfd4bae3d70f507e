import numpy as np
import pytest

TAUS = (0.2 + 0.9j, -0.5 + 1.3j, 0.5j)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(params=TAUS, ids=["tau0", "tau1", "tau2"])
def tau(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
