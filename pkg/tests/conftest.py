import numpy as np
import pytest

from kraustangle.channels import TwoQubitPure

S2 = 1 / np.sqrt(2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def ghz3():
    c = np.zeros(8, dtype=complex)
    c[0] = c[7] = S2
    return c


def w3():
    c = np.zeros(8, dtype=complex)
    c[1] = c[2] = c[4] = 1 / np.sqrt(3)
    return c


def bell():
    return TwoQubitPure(alpha=S2, beta=0, gamma=0, delta=S2)


def random_matrices(rng, n):
    return rng.standard_normal((n, 2, 2)) + 1j * rng.standard_normal((n, 2, 2))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        ok, detail = mod.RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
