import pytest
from hypothesis import HealthCheck, settings

from qpot import model as M

settings.register_profile("qpot", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("qpot")

# criterion -> summary line, filled by test_acceptance and printed at the end
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def asep():
    return M.asep()


@pytest.fixture(scope="session")
def cubic():
    return M.cubic(0.2)


@pytest.fixture(scope="session", params=["asep", "cubic"])
def em(request, asep, cubic):
    return asep if request.param == "asep" else cubic


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
