import numpy as np
import pytest

from acceptance_report import RESULTS


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def _order(key):
    digits = "".join(ch for ch in key if ch.isdigit())
    return int(digits), key


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS, key=_order):
        terminalreporter.write_line(RESULTS[key])
