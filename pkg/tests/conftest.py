import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def disc_points(radius=0.95):
    """Complex numbers with modulus at most ``radius``."""
    return st.tuples(
        st.floats(0.0, radius, allow_nan=False), st.floats(0.0, 2 * np.pi, allow_nan=False)
    ).map(lambda t: t[0] * complex(np.cos(t[1]), np.sin(t[1])))


def separated(points, gap):
    pts = np.asarray(points, dtype=complex)
    if len(pts) < 2:
        return True
    d = np.abs(pts[:, None] - pts[None, :]) + np.eye(len(pts))
    return d.min() >= gap


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE_LINES = []


def report(criterion, ok, detail):
    """Record and print one acceptance line."""
    line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
