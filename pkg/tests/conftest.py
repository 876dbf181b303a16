import itertools

import numpy as np
import pytest

from dickeprep.pulse import PulseParams

# Pulse used for the N=6, m=2 reference run: Omega0 T = 10, Delta0 T = 6, 10T stages.
FIG4 = PulseParams(omega0_T=10.0, delta0_T=6.0, window_halfwidth=5.0)


def small_sectors(max_n, min_m=0, max_m=None):
    out = []
    for n in range(1, max_n + 1):
        top = n if max_m is None else min(n, max_m)
        out.extend((n, m) for m in range(min_m, top + 1))
    return out


def brute_force_sector(n, m):
    """Every (pattern, mu) with popcount + mu = m, by scanning all 2^n patterns."""
    return [
        (p, mu)
        for p in range(1 << n)
        for mu in range(m + 1)
        if bin(p).count("1") + mu == m
    ]


def kron_hamiltonian(n, m, omega, delta, gains=None):
    """Sector Hamiltonian built from tensor products of sigma+ and a, then projected.

    Ion j is tensor factor j (ion 1 leftmost); the phonon mode is truncated at m quanta.
    """
    gains = np.ones(n) if gains is None else np.asarray(gains)
    a = np.diag(np.sqrt(np.arange(1, m + 1)), 1)
    num = a.T @ a
    sp = np.array([[0.0, 0.0], [1.0, 0.0]])  # |1><0| with |0> = (1,0)
    eye2 = np.eye(2)

    def ion_op(j, op):
        mats = [op if k == j else eye2 for k in range(n)]
        return mats

    dim = 2**n * (m + 1)
    h = np.zeros((dim, dim))
    for j in range(n):
        term = np.array([[1.0]])
        for mat in ion_op(j, sp):
            term = np.kron(term, mat)
        jump = np.kron(term, a)
        h += gains[j] * omega / 2 * (jump + jump.T)
    h += delta / 2 * np.kron(np.eye(2**n), 2 * num - m * np.eye(m + 1))

    # map (pattern, mu) -> tensor index; ion j+1 is tensor factor j, bit j of pattern
    def tindex(pattern, mu):
        idx = 0
        for j in range(n):
            idx = idx * 2 + ((pattern >> j) & 1)
        return idx * (m + 1) + mu

    return h, tindex


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_state(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def all_permutations(n):
    return list(itertools.permutations(range(n)))


ACCEPTANCE_LINES = []


def record_criterion(name, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
