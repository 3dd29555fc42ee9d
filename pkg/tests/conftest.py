import numpy as np
import pytest

from freewave import HarmonicSolver, SolveOptions, newton_traveling


@pytest.fixture(scope="session")
def solver():
    return HarmonicSolver()


@pytest.fixture(scope="session")
def waves64(solver):
    """Even Stokes waves at k=1, n=64 for a few amplitudes."""
    return {a: newton_traveling(1.0, a, n=64, solver=solver) for a in (0.01, 0.05, 0.1)}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_trace(rng, n, modes=6, scale=0.1, period=2 * np.pi):
    x = np.arange(n) * period / n
    k0 = 2 * np.pi / period
    out = np.zeros(n)
    for j in range(1, modes + 1):
        out += scale / j**2 * (rng.normal() * np.cos(j * k0 * x) + rng.normal() * np.sin(j * k0 * x))
    return out


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
