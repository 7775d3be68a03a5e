import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from qsw.qseries import QParams

settings.register_profile("qsw", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("qsw")

# desk-scale parameter box where accuracy claims are asserted
p_box = st.floats(min_value=0.0, max_value=0.7, allow_nan=False)
q_box = st.floats(min_value=0.1, max_value=0.7, allow_nan=False)
params_box = st.builds(QParams, p_box, q_box)

GRID = [(0.0, 0.5), (0.3, 0.4), (0.5, 0.5)]


def rel(a, b):
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


@pytest.fixture(params=GRID, ids=lambda pq: f"p{pq[0]}-q{pq[1]}")
def grid_params(request):
    return QParams(*request.param)


@pytest.fixture
def classical():
    """p = 0, q = 1/2: the classical Stieltjes-Wigert case."""
    return QParams(0.0, 0.5)


@pytest.fixture
def diagonal():
    """p = q = 1/2, where many closed forms collapse to constants."""
    return QParams(0.5, 0.5)


def log_close(x, y, tol):
    return abs(math.log(abs(x)) - math.log(abs(y))) < tol


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n][1])
