from math import sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import all_permutations, kron_hamiltonian, random_state, small_sectors
from dickeprep.errors import BasisMismatch, InvalidArgs
from dickeprep.hamiltonian import apply_hamiltonian, build_coupling_block, build_hamiltonian
from dickeprep.pulse import PulseParams, delta, omega
from dickeprep.subspace import enumerate_sector, product_state


def brute_block(basis, mu):
    """0/1 block by testing every (upper, lower) pair for a single added bit."""
    up = [basis.states[i] for i in range(*basis.manifold_slice(mu).indices(basis.dim))]
    lo = [basis.states[i] for i in range(*basis.manifold_slice(mu - 1).indices(basis.dim))]
    out = np.zeros((len(up), len(lo)), dtype=int)
    for r, u in enumerate(up):
        for c, l in enumerate(lo):
            diff = u.ions ^ l.ions
            if (l.ions & u.ions) == u.ions and bin(diff).count("1") == 1:
                out[r, c] = 1
    return out


def test_block_4_2_1():
    b = enumerate_sector(4, 2)
    blk = build_coupling_block(b, 1)
    assert blk.shape == (4, 6)
    d = blk.dense()
    np.testing.assert_array_equal(d, brute_block(b, 1))
    assert set(d.sum(axis=1)) == {3}
    assert set(d.sum(axis=0)) == {2}


def test_block_small_examples():
    b = enumerate_sector(2, 2)
    d = build_coupling_block(b, 2).dense()
    np.testing.assert_array_equal(d, [[1, 1]])
    d6 = build_coupling_block(enumerate_sector(6, 2), 2).dense()
    assert d6.shape == (1, 6) and d6.sum() == 6


@pytest.mark.parametrize("n,m", small_sectors(7, min_m=1))
def test_block_counts_and_brute_force(n, m):
    b = enumerate_sector(n, m)
    for mu in range(1, m + 1):
        d = build_coupling_block(b, mu).dense()
        np.testing.assert_array_equal(d, brute_block(b, mu))
        assert np.all(d.sum(axis=1) == n - m + mu)
        assert np.all(d.sum(axis=0) == m - mu + 1)


def test_block_mu_range():
    b = enumerate_sector(3, 2)
    with pytest.raises(InvalidArgs):
        build_coupling_block(b, 0)
    with pytest.raises(InvalidArgs):
        build_coupling_block(b, 3)


def test_single_ion_matrix():
    b = enumerate_sector(1, 1)
    op = build_hamiltonian(b)
    p = PulseParams(omega0_T=3.0, delta0_T=2.0)
    h = op.matrix(0.0, p)
    np.testing.assert_allclose(h, [[0, 1.5], [1.5, 0]], atol=0)
    assert [s.label(1) for s in b.states] == ["|0>|1>", "|1>|0>"]


def test_zero_detuning_at_center():
    op = build_hamiltonian(enumerate_sector(4, 3))
    h = op.matrix(0.0, PulseParams(5.0, 7.0))
    assert np.all(np.diag(h) == 0)


def test_fock_state_only_reaches_next_manifold():
    b = enumerate_sector(5, 3)
    op = build_hamiltonian(b)
    p = PulseParams(4.0, 6.0)
    t = 0.7
    out = apply_hamiltonian(op, t, p, product_state(b, 0, 3)).amplitudes
    mu = b.phonon_numbers()
    assert out[0] == pytest.approx(1.5 * delta(p, t))
    assert np.all(out[(mu != 3) & (mu != 2)] == 0)
    np.testing.assert_allclose(out[mu == 2], omega(p, t) * sqrt(3) / 2, rtol=1e-15)


@pytest.mark.parametrize("n,m", small_sectors(5, min_m=1))
def test_matches_tensor_product_oracle(n, m, rng):
    b = enumerate_sector(n, m)
    gains = rng.uniform(0.8, 1.2, size=n)
    p = PulseParams(3.3, 2.1)
    t = -0.4
    ref, tindex = kron_hamiltonian(n, m, float(omega(p, t)), float(delta(p, t)), gains)
    idx = [tindex(s.ions, s.phonons) for s in b.states]
    h = build_hamiltonian(b, gains).matrix(t, p)
    np.testing.assert_allclose(h, ref[np.ix_(idx, idx)], atol=1e-14)
    # the sector is closed under the full Hamiltonian
    outside = np.setdiff1d(np.arange(ref.shape[0]), idx)
    assert np.all(ref[np.ix_(outside, idx)] == 0)


@pytest.mark.parametrize("n,m", small_sectors(5, min_m=1))
def test_hermitian_and_tridiagonal(n, m, rng):
    b = enumerate_sector(n, m)
    op = build_hamiltonian(b, rng.uniform(0.5, 1.5, size=n))
    p = PulseParams(7.0, 4.0)
    mu = b.phonon_numbers()
    for t in rng.uniform(-5, 5, size=4):
        h = op.matrix(t, p)
        assert np.max(np.abs(h - h.conj().T)) <= 1e-12
        far = np.abs(mu[:, None] - mu[None, :]) >= 2
        assert np.all(h[far] == 0)
        phi, psi = random_state(rng, b.dim), random_state(rng, b.dim)
        lhs = np.vdot(phi, op.matvec(t, p, psi))
        rhs = np.conj(np.vdot(psi, op.matvec(t, p, phi)))
        assert abs(lhs - rhs) <= 1e-12
        # dense and matrix-free agree
        assert np.max(np.abs(h @ psi - op.matvec(t, p, psi))) <= 1e-14


@pytest.mark.parametrize("n,m", [(3, 1), (3, 2), (4, 2), (5, 2), (5, 3)])
def test_commutes_with_ion_permutations(n, m):
    b = enumerate_sector(n, m)
    h = build_hamiltonian(b).matrix(0.3, PulseParams(5.0, 3.0))
    for perm in all_permutations(n):
        p = b.permutation_indices(perm)
        P = np.zeros((b.dim, b.dim))
        P[p, np.arange(b.dim)] = 1
        assert np.max(np.abs(P @ h - h @ P)) <= 1e-12


def test_inhomogeneous_elements_scale_with_gain():
    b = enumerate_sector(3, 1)
    gains = [0.9, 1.0, 1.1]
    h = build_hamiltonian(b, gains).matrix(0.0, PulseParams(2.0, 0.0))
    for j, g in enumerate(gains):
        assert h[0, b.index_of(1 << j, 0)] == pytest.approx(g * 2.0 / 2)


def test_with_gains_reuses_blocks():
    b = enumerate_sector(4, 2)
    op = build_hamiltonian(b)
    op2 = op.with_gains([1.0, 0.0, 0.0, 0.0])
    assert op2.blocks is op.blocks
    assert op2.coupling.nnz < op.coupling.nnz


def test_basis_mismatch_and_gain_shape():
    op = build_hamiltonian(enumerate_sector(3, 1))
    other = enumerate_sector(3, 2)
    with pytest.raises(BasisMismatch):
        apply_hamiltonian(op, 0.0, PulseParams(), product_state(other, 0, 2))
    with pytest.raises(InvalidArgs):
        build_hamiltonian(enumerate_sector(3, 1), [1.0, 1.0])


@given(st.floats(-50, 50), st.floats(0.1, 30), st.floats(0, 30))
@settings(max_examples=50, deadline=None)
def test_matvec_finite_for_any_time(t, om, de):
    op = build_hamiltonian(enumerate_sector(3, 2))
    y = np.ones(op.dim, dtype=complex) / np.sqrt(op.dim)
    assert np.all(np.isfinite(op.matvec(t, PulseParams(om, de), y)))
