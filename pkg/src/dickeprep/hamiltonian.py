"""Red-sideband interaction Hamiltonian over a conserved-excitation sector.

In the interaction picture the Hamiltonian is block tridiagonal in the
phonon number. The ``mu``-phonon manifold carries the diagonal energy
``(2 mu - m) Delta(t) / 2`` and neighbouring manifolds are linked by the
coupling blocks, whose nonzero entries are ``g_j Omega(t) sqrt(mu) / 2`` for
the ion ``j`` that absorbs the phonon.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from . import pulse as _pulse
from .errors import InvalidArgs
from .subspace import SectorBasis, StateVector, check_same_basis

DENSE_DIMENSION_LIMIT = 4096


@dataclass(frozen=True, eq=False)
class CouplingBlock:
    """0/1 pattern linking the ``mu``-phonon manifold (rows) to ``mu - 1`` (cols).

    ``rows``, ``cols`` are manifold-local indices and ``ions`` names the ion
    whose bit is set by the transition.
    """

    mu: int
    shape: tuple[int, int]
    rows: np.ndarray
    cols: np.ndarray
    ions: np.ndarray

    def matrix(self) -> sp.csr_matrix:
        data = np.ones(len(self.rows), dtype=np.int64)
        return sp.csr_matrix((data, (self.rows, self.cols)), shape=self.shape)

    def dense(self) -> np.ndarray:
        return self.matrix().toarray()


def build_coupling_block(basis: SectorBasis, mu: int) -> CouplingBlock:
    if not 1 <= mu <= basis.n_quanta:
        raise InvalidArgs(f"coupling block mu={mu} outside 1..{basis.n_quanta}")
    upper = basis.manifold_slice(mu)
    lower = basis.manifold_slice(mu - 1)
    rows, cols, ions = [], [], []
    for r, i in enumerate(range(upper.start, upper.stop)):
        pattern = basis.states[i].ions
        for j in range(basis.n_ions):
            if not (pattern >> j) & 1:
                c = basis._index[(pattern | (1 << j), mu - 1)] - lower.start
                rows.append(r)
                cols.append(c)
                ions.append(j)
    shape = (upper.stop - upper.start, lower.stop - lower.start)
    return CouplingBlock(
        mu,
        shape,
        np.asarray(rows, dtype=np.int64),
        np.asarray(cols, dtype=np.int64),
        np.asarray(ions, dtype=np.int64),
    )


@dataclass(frozen=True, eq=False)
class HamiltonianOperator:
    basis: SectorBasis
    blocks: tuple[CouplingBlock, ...]
    gains: np.ndarray
    diagonal: np.ndarray = field(repr=False)
    coupling: sp.csr_matrix = field(repr=False)

    @property
    def dim(self) -> int:
        return self.basis.dim

    def with_gains(self, gains: Sequence[float]) -> "HamiltonianOperator":
        return _assemble(self.basis, self.blocks, gains)

    def matvec(self, t: float, pulse: _pulse.PulseParams, y: np.ndarray) -> np.ndarray:
        """H(t) @ y on raw amplitude arrays (last axis or 1-D)."""
        return float(_pulse.delta(pulse, t)) * (self.diagonal * y) + float(
            _pulse.omega(pulse, t)
        ) * (self.coupling @ y)

    def sparse_matrix(self, t: float, pulse: _pulse.PulseParams) -> sp.csr_matrix:
        d = float(_pulse.delta(pulse, t)) * self.diagonal
        return (sp.diags(d) + float(_pulse.omega(pulse, t)) * self.coupling).tocsr()

    def matrix(self, t: float, pulse: _pulse.PulseParams) -> np.ndarray:
        if self.dim > DENSE_DIMENSION_LIMIT:
            raise InvalidArgs(f"dense materialisation limited to dim <= {DENSE_DIMENSION_LIMIT}")
        return self.sparse_matrix(t, pulse).toarray()


def _assemble(basis: SectorBasis, blocks, gains) -> HamiltonianOperator:
    n = basis.n_ions
    g = np.ones(n) if gains is None else np.asarray(gains, dtype=float)
    if g.shape != (n,):
        raise InvalidArgs(f"expected {n} ion gains, got shape {g.shape}")
    g.setflags(write=False)

    m = basis.n_quanta
    diagonal = (2.0 * basis.phonon_numbers() - m) / 2.0
    diagonal.setflags(write=False)

    rows, cols, data = [], [], []
    for b in blocks:
        up = basis.manifold_slice(b.mu).start
        lo = basis.manifold_slice(b.mu - 1).start
        rows.append(b.rows + up)
        cols.append(b.cols + lo)
        data.append(g[b.ions] * (sqrt(b.mu) / 2.0))
    if rows:
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        v = np.concatenate(data)
        upper = sp.csr_matrix((v, (r, c)), shape=(basis.dim, basis.dim))
        coupling = (upper + upper.T).tocsr()
    else:
        coupling = sp.csr_matrix((basis.dim, basis.dim))
    return HamiltonianOperator(basis, tuple(blocks), g, diagonal, coupling)


def build_hamiltonian(basis: SectorBasis, gains: Sequence[float] | None = None) -> HamiltonianOperator:
    """Assemble the sector Hamiltonian; ``gains`` scale Omega per ion (default 1)."""
    blocks = tuple(build_coupling_block(basis, mu) for mu in range(1, basis.n_quanta + 1))
    return _assemble(basis, blocks, gains)


def apply_hamiltonian(
    op: HamiltonianOperator, t: float, pulse: _pulse.PulseParams, psi: StateVector
) -> StateVector:
    check_same_basis(psi.basis, op.basis)
    return StateVector(op.basis, op.matvec(t, pulse, psi.amplitudes))
