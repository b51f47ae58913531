import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from besovlab.spectral import TorusGrid

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(params=[2, 3], ids=["2d", "3d"])
def grid(request):
    return TorusGrid(request.param, 32 if request.param == 2 else 16)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
