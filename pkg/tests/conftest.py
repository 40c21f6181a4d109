import math

import numpy as np
import pytest
from hypothesis import strategies as st

from uavlos.channel import RadioParams

DEFAULT_RADIO = RadioParams()

# Filled by test_acceptance; printed once at the end of the run.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


coords = st.floats(-200.0, 200.0, allow_nan=False, allow_infinity=False)
points = st.tuples(coords, coords, coords)


@st.composite
def directions(draw):
    v = draw(st.tuples(coords, coords, coords))
    n = math.sqrt(sum(c * c for c in v))
    if n < 1e-3:
        return (0.0, 0.0, 1.0)
    return tuple(c / n for c in v)


@st.composite
def distinct_points(draw, min_gap=1e-2):
    a = draw(points)
    b = draw(points)
    if math.dist(a, b) < min_gap:
        b = (a[0] + 1.0, a[1], a[2])
    return a, b


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
