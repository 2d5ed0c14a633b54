import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from invkahler.lie_core import so3, su2, su3

settings.register_profile(
    "default", deadline=None, max_examples=25, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ALGEBRAS = {"su2": su2(), "so3": so3(), "su3": su3()}

# filled by test_acceptance, printed at the end of the session
ACCEPTANCE_LINES: dict = {}


@pytest.fixture(params=sorted(ALGEBRAS))
def alg(request):
    return ALGEBRAS[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
