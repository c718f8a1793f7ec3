import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hillwave.coefficients import MathieuParams

settings.register_profile(
    "hillwave", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("hillwave")

GRID_A = (-2.0, -0.5, 0.7, 1.0, 2.5, 5.3, 9.7)
GRID_Q = (0.5, 1.0, 2.0)


@pytest.fixture
def unit_params():
    return MathieuParams(1.0, 1.0)


@pytest.fixture(params=[(a, q) for a in GRID_A for q in GRID_Q], ids=lambda p: f"a={p[0]},q={p[1]}")
def grid_params(request):
    return MathieuParams(*request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
