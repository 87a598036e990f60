import os

import pytest
from hypothesis import HealthCheck, settings

from ksv.koszul import golden_suite
from ksv.scalars import GF, QQ

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.register_profile("thorough", deadline=None, max_examples=400)
settings.load_profile(os.environ.get("KSV_HYPOTHESIS_PROFILE", "default"))

F5 = GF(5)


@pytest.fixture(scope="session", params=[QQ, F5], ids=["Q", "F5"])
def golden(request):
    return golden_suite(request.param)


@pytest.fixture(scope="session")
def golden_f5():
    return golden_suite(F5)


# acceptance lines, printed once at the end of the run -------------------------------

ACCEPTANCE_LINES: list = []


@pytest.fixture
def acceptance():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
