import itertools

import numpy as np
import pytest

from mimome_tas.channel import generate_rayleigh

ACCEPTANCE_LINES: list[str] = []


def brute_capacity(H, rho):
    """Independent oracle: log2 det via numpy's LU determinant."""
    H = np.asarray(H)
    G = np.eye(H.shape[0]) + rho * H @ H.conj().T
    return float(np.log2(np.linalg.det(G).real))


def brute_best(Hm, L, rho_m, He=None, rho_e=None):
    """Maximum of the scenario objective over all size-L subsets."""
    best = -np.inf
    for S in itertools.combinations(range(Hm.shape[1]), L):
        v = brute_capacity(Hm[:, S], rho_m)
        if He is not None:
            v -= brute_capacity(He[:, S], rho_e)
        best = max(best, v)
    return best


@pytest.fixture
def channel_pair():
    def make(nr, ne, nt, seed):
        return generate_rayleigh(nr, nt, 2 * seed), generate_rayleigh(ne, nt, 2 * seed + 1)

    return make


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
