import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def random_triangle(rng, low=0.1, high=2.0):
    while True:
        v = np.sort(rng.uniform(low, high, 3))
        if v[2] < v[0] + v[1]:
            return tuple(float(x) for x in v)


def sphere_closed_form(side):
    # equilateral Fermat leg r: cos(side) = cos^2 r - sin^2 r / 2
    return 3.0 * math.asin(math.sqrt(2.0 * (1.0 - math.cos(side)) / 3.0))


def hyperbolic_closed_form(side):
    return 3.0 * math.asinh(math.sqrt(2.0 * (math.cosh(side) - 1.0) / 3.0))
