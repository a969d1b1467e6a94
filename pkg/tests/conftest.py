import numpy as np
import pytest

from regrich.spectral import from_blocks, jordan_matrix

OMEGA = np.exp(2j * np.pi / 3)


def rand_c(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def well_conditioned(rng, d, max_cond=50.0):
    while True:
        P = rand_c(rng, d, d)
        if np.linalg.cond(P) < max_cond:
            return P


def big_type():
    """Five eigenvalues in two torsion classes, blocks 4,2,1 / 3,2 / 2 / 2 / 1 (d = 17)."""
    lams = [np.exp(1j * np.pi / 2), np.exp(7j * np.pi / 6), np.exp(11j * np.pi / 6),
            2 * np.exp(1j * np.pi / 6), 2 * np.exp(5j * np.pi / 6)]
    return from_blocks(lams, [[4, 2, 1], [3, 2], [2], [2], [1]])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def toroidal():
    return np.diag([1, OMEGA, OMEGA ** 2])


@pytest.fixture
def big_matrix():
    return jordan_matrix(big_type())


@pytest.fixture
def poor2():
    return np.diag([2.0, 1.0]), np.array([[0.0, -1.0], [0.0, 0.0]])


def random_jordan_type(rng, d, torsion_bias=0.5):
    """Random eigenvalues and block lists with total size d.

    With probability torsion_bias new eigenvalues are roots-of-unity multiples of
    earlier ones, so mod-T classes with several members occur often.
    """
    sizes_left = d
    lams, blocks = [], []
    while sizes_left:
        s = int(rng.integers(1, sizes_left + 1))
        parts, rest = [], s
        while rest:
            t = int(rng.integers(1, rest + 1))
            parts.append(t)
            rest -= t
        while True:
            if lams and rng.random() < torsion_bias:
                q = int(rng.integers(2, 7))
                lam = lams[int(rng.integers(len(lams)))] * np.exp(2j * np.pi * rng.integers(1, q) / q)
            else:
                lam = np.exp(rng.uniform(-0.7, 0.7)) * np.exp(1j * rng.uniform(0, 2 * np.pi))
            if all(abs(lam - m) > 0.2 for m in lams):
                break
        lams.append(lam)
        blocks.append(sorted(parts, reverse=True))
        sizes_left -= s
    return lams, blocks


# acceptance lines, filled by test_acceptance.py and echoed after the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
