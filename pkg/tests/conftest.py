import sys
import numpy as np
import pytest

from discord_bound.rng import complex_gaussian, stream


def random_hermitian(n, seed):
    g = complex_gaussian(stream(seed, 99), (n, n))
    return g + g.conj().T


@pytest.fixture
def bell():
    from discord_bound.states import family

    return family("bell_phi_plus")


@pytest.fixture
def sigma():
    return {
        "x": np.array([[0, 1], [1, 0]], dtype=complex),
        "y": np.array([[0, -1j], [1j, 0]]),
        "z": np.diag([1.0, -1.0]).astype(complex),
    }


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", {}).get("lines") if mod else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])
