import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


def random_spd(rng, p):
    B = rng.standard_normal((p, p))
    return B @ B.T + 0.5 * np.eye(p)


def sparse_pca_matrix(rng, n, symmetric=False):
    A = rng.standard_normal((n, n))
    A = (A - A.mean(0)) / A.std(0, ddof=1)
    if symmetric:
        A = 0.5 * (A + A.T)
    return A


_ACCEPTANCE_LINES = []


@pytest.fixture
def scorecard(request):
    """Write a line past output capture and keep it for the final summary."""
    terminal = request.config.pluginmanager.get_plugin("terminalreporter")

    def write(line):
        _ACCEPTANCE_LINES.append(line)
        if terminal is not None:
            terminal.write_line("")
            terminal.write_line(line)

    return write


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance scorecard")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
