"""Shared oracles for the test suite.

Random symplectics are built from the Lie algebra (``expm(Omega H)`` with
``H`` symmetric), independently of the decomposition code under test.
"""

import numpy as np
import pytest
from scipy.linalg import expm
from scipy.stats import unitary_group

from cvloop import gaussian as g


def omega_oracle(n):
    z, i = np.zeros((n, n)), np.eye(n)
    return np.block([[z, i], [-i, z]])


def random_symplectic(n, rng, scale=0.4):
    h = rng.normal(size=(2 * n, 2 * n)) * scale
    return expm(omega_oracle(n) @ (h + h.T) / 2)


def random_unitary(n, rng):
    if n == 1:
        return np.array([[np.exp(1j * rng.uniform(-np.pi, np.pi))]])
    return unitary_group.rvs(n, random_state=rng)


def unitary_oracle(U):
    """xxpp symplectic of ``a -> U a`` written out by hand."""
    re, im = U.real, U.imag
    return np.block([[re, -im], [im, re]])


def random_state(n, rng, spread=1.0):
    """Random mixed Gaussian state: thermal occupations under a random symplectic."""
    S = random_symplectic(n, rng, scale=0.3)
    nu = 0.5 + rng.exponential(0.3, size=n)
    cov = S @ np.diag(np.concatenate([nu, nu])) @ S.T
    return g.GaussianState(rng.normal(scale=spread, size=2 * n), cov)


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


ACCEPTANCE_LINES = []


def report_criterion(number, passed, detail):
    """Record and print the one-line verdict of an acceptance criterion."""
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'} | {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
