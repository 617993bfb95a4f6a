import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "catvisc", deadline=None, max_examples=150, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("catvisc")

# acceptance verdict lines, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def cap_point(max_angle=0.7, pole=(0.0, 0.0, 1.0)):
    """Strategy: unit vectors within ``max_angle`` of the north pole."""
    return st.tuples(
        st.floats(0.0, max_angle), st.floats(0.0, 2 * math.pi)
    ).map(lambda ap: np.array([
        math.sin(ap[0]) * math.cos(ap[1]),
        math.sin(ap[0]) * math.sin(ap[1]),
        math.cos(ap[0]),
    ]))


plane_point = st.tuples(st.floats(-3, 3), st.floats(-3, 3)).map(np.array)
unit_interval = st.floats(0.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
