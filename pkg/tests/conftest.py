import numpy as np
import pytest

from csid import SeededRng


@pytest.fixture
def rng():
    return SeededRng(1234)


def direct_convolution(a, b):
    """Double-sum oracle for full linear convolution."""
    out = np.zeros(len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def direct_fir(taps, x):
    """d[n] = sum_j taps[j] * x[n - j] with zero pre-history."""
    out = np.zeros(len(x))
    for n in range(len(x)):
        for j, t in enumerate(taps):
            if n - j >= 0:
                out[n] += t * x[n - j]
    return out


ACCEPTANCE_REPORT = []


def report(criterion, passed, detail):
    """Record one acceptance line; printed in the terminal summary."""
    ACCEPTANCE_REPORT.append(f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_REPORT:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_REPORT:
            terminalreporter.write_line(line)
