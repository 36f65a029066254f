import numpy as np
import pytest

# PASS/FAIL lines collected by test_acceptance.py, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_points(rng, n):
    x = rng.normal(size=(n, 4))
    return x / np.linalg.norm(x, axis=-1, keepdims=True)
