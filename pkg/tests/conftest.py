import numpy as np
import pytest

from jumpform.model import make_chain

ACCEPTANCE_LINES = []


@pytest.fixture
def two_state():
    """Rate-1 two-state chain with counting measure."""
    return make_chain([1.0, 1.0], [[0.0, 1.0], [1.0, 0.0]])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
