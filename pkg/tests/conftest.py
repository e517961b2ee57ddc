import numpy as np
import pytest

from arks import grid as G

# acceptance tests register one line per criterion here; the terminal-summary
# hook prints the block so the report survives pytest's output capture
ACCEPTANCE_RESULTS = []


def record_acceptance(name, passed, note=""):
    ACCEPTANCE_RESULTS.append((name, bool(passed), note))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, passed, note in ACCEPTANCE_RESULTS:
        line = f"{'PASS' if passed else 'FAIL'}  {name}"
        if note:
            line += f"  ({note})"
        terminalreporter.write_line(line)


@pytest.fixture
def unit_square_64():
    return G.rectangle((1.0, 1.0), (64, 64))


@pytest.fixture
def unit_interval_128():
    return G.interval(1.0, 128)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
