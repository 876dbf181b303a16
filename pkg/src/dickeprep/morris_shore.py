"""Morris-Shore factorisation checks and the symmetric Dicke ladder.

The factorisation exists when, for every intermediate manifold, the products
``V V^T`` of the incoming coupling block and ``V'^T V'`` of the outgoing one
commute. Here the blocks are 0/1 incidence matrices, so all products are
computed in exact integer arithmetic and the residuals are integers.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from math import sqrt

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg  # noqa: F401  (registers sp.linalg)

from . import pulse as _pulse
from .errors import InvalidArgs
from .hamiltonian import build_coupling_block
from .subspace import DEFAULT_DIMENSION_CAP, SectorBasis, StateVector, dicke_state, enumerate_sector

EIGEN_TOLERANCE = 1e-12


@dataclass
class ManifoldCheck:
    mu: int
    commutator_norm: float
    identity_residual: float
    shift: int
    diag_incoming: int | None
    diag_outgoing: int | None
    offdiag_ones_per_row: int | None
    offdiag_match: bool
    row_sum: int | None
    expected_diag_incoming: int
    expected_diag_outgoing: int
    expected_offdiag_ones: int
    expected_row_sum: int

    @property
    def combinatorics_ok(self) -> bool:
        return (
            self.diag_incoming == self.expected_diag_incoming
            and self.diag_outgoing == self.expected_diag_outgoing
            and self.offdiag_ones_per_row == self.expected_offdiag_ones
            and self.offdiag_match
            and self.row_sum == self.expected_row_sum
        )


@dataclass
class MsVerificationReport:
    N: int
    m: int
    manifolds: list[ManifoldCheck] = field(default_factory=list)
    row_sums_ok: bool = True
    tolerance: float = EIGEN_TOLERANCE

    @property
    def commutator_norms(self) -> list[float]:
        return [c.commutator_norm for c in self.manifolds]

    @property
    def identity_residuals(self) -> list[float]:
        return [c.identity_residual for c in self.manifolds]

    @property
    def passed(self) -> bool:
        return all(
            c.commutator_norm <= self.tolerance and c.identity_residual <= self.tolerance
            for c in self.manifolds
        )

    @property
    def combinatorics_ok(self) -> bool:
        return self.row_sums_ok and all(c.combinatorics_ok for c in self.manifolds)

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "m": self.m,
            "pass": self.passed,
            "combinatorics_ok": self.combinatorics_ok,
            "manifolds": [asdict(c) for c in self.manifolds],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    def to_text(self) -> str:
        lines = [f"Morris-Shore check  N={self.N}  m={self.m}"]
        if not self.manifolds:
            lines.append("  no intermediate manifolds")
        else:
            lines.append(
                f"  {'mu':>3} {'||[A,B]||':>10} {'identity':>10} {'diag A':>7} {'diag B':>7}"
                f" {'offdiag':>8} {'rowsum':>7}"
            )
            for c in self.manifolds:
                lines.append(
                    f"  {c.mu:>3} {c.commutator_norm:>10.3g} {c.identity_residual:>10.3g}"
                    f" {c.diag_incoming!s:>7} {c.diag_outgoing!s:>7}"
                    f" {c.offdiag_ones_per_row!s:>8} {c.row_sum!s:>7}"
                )
        lines.append(f"  pass: {self.passed}  combinatorics: {self.combinatorics_ok}")
        return "\n".join(lines)


def _uniform(values: np.ndarray) -> int | None:
    """The common value of an integer array, or None when entries differ."""
    if values.size == 0:
        return None
    first = int(values[0])
    return first if np.all(values == first) else None


def _split_diag(mat: sp.csr_matrix) -> tuple[np.ndarray, sp.csr_matrix]:
    d = mat.diagonal()
    off = (mat - sp.diags(d)).tocsr()
    off.eliminate_zeros()
    return d, off


def verify_ms_conditions(N: int, m: int, cap: int = DEFAULT_DIMENSION_CAP) -> MsVerificationReport:
    basis = enumerate_sector(N, m, cap=cap)
    blocks = {mu: build_coupling_block(basis, mu).matrix() for mu in range(1, m + 1)}
    report = MsVerificationReport(N, m)

    for mu in range(1, m + 1):
        v = blocks[mu]
        expected = (m - mu + 1) * (N - m + mu)
        sums_up = np.asarray((v @ v.T).sum(axis=1)).ravel()
        sums_down = np.asarray((v.T @ v).sum(axis=1)).ravel()
        if not (np.all(sums_up == expected) and np.all(sums_down == expected)):
            report.row_sums_ok = False

    for mu in range(1, m):
        incoming = (blocks[mu] @ blocks[mu].T).tocsr()
        outgoing = (blocks[mu + 1].T @ blocks[mu + 1]).tocsr()
        commutator = incoming @ outgoing - outgoing @ incoming
        shift = N - 2 * m + 2 * mu
        identity = incoming - outgoing - shift * sp.identity(incoming.shape[0], dtype=np.int64)
        d_in, off_in = _split_diag(incoming)
        d_out, off_out = _split_diag(outgoing)
        off_counts = np.diff(off_in.indptr) if np.all(off_in.data == 1) else None
        report.manifolds.append(
            ManifoldCheck(
                mu=mu,
                commutator_norm=float(sp.linalg.norm(commutator)) if commutator.nnz else 0.0,
                identity_residual=float(abs(identity).max()) if identity.nnz else 0.0,
                shift=shift,
                diag_incoming=_uniform(d_in),
                diag_outgoing=_uniform(d_out),
                offdiag_ones_per_row=None if off_counts is None else _uniform(off_counts),
                offdiag_match=(off_in != off_out).nnz == 0,
                row_sum=_uniform(np.asarray(incoming.sum(axis=1)).ravel()),
                expected_diag_incoming=N - m + mu,
                expected_diag_outgoing=m - mu,
                expected_offdiag_ones=(m - mu) * (N - m + mu),
                expected_row_sum=(m - mu + 1) * (N - m + mu),
            )
        )
    return report


def ladder_couplings(N: int, m: int) -> list[float]:
    """Ladder couplings per unit Omega, for mu = 1..m."""
    if not 1 <= m <= N:
        raise InvalidArgs("need 1 <= m <= N")
    return [0.5 * sqrt(mu * (m - mu + 1) * (N - m + mu)) for mu in range(1, m + 1)]


@dataclass(frozen=True, eq=False)
class DickeLadder:
    """The (m+1)-level chain |W_{m-mu}^N>|mu>, stored for mu = m down to 0.

    ``couplings[mu - 1]`` links levels ``mu`` and ``mu - 1``; ``detunings``
    are the coefficients of Delta(t) in the same order as ``states``.
    """

    n_ions: int
    n_quanta: int
    couplings: tuple[float, ...]
    detunings: tuple[float, ...]
    states: tuple[StateVector, ...] | None = None

    @property
    def dim(self) -> int:
        return self.n_quanta + 1

    def unit_coupling_matrix(self) -> np.ndarray:
        m = self.n_quanta
        c = np.zeros((m + 1, m + 1))
        for mu in range(1, m + 1):
            i, j = m - mu, m - mu + 1
            c[i, j] = c[j, i] = self.couplings[mu - 1]
        return c

    def matrix(self, t: float, pulse: _pulse.PulseParams) -> np.ndarray:
        h = float(_pulse.omega(pulse, t)) * self.unit_coupling_matrix()
        h[np.diag_indices(self.dim)] = float(_pulse.delta(pulse, t)) * np.asarray(self.detunings)
        return h

    def embed(self, amplitudes) -> StateVector:
        """Map ladder amplitudes back into the full sector."""
        if self.states is None:
            raise InvalidArgs("ladder was built without sector states")
        amps = np.asarray(amplitudes)
        full = sum(a * s.amplitudes for a, s in zip(amps, self.states))
        return StateVector(self.states[0].basis, full)


def dicke_ladder(N: int, m: int) -> DickeLadder:
    """Analytic ladder only; no sector enumeration, so usable for large N."""
    if not 0 <= m <= N:
        raise InvalidArgs("need 0 <= m <= N")
    couplings = tuple(ladder_couplings(N, m)) if m else ()
    detunings = tuple((2 * mu - m) / 2 for mu in range(m, -1, -1))
    return DickeLadder(N, m, couplings, detunings)


def build_dicke_ladder(basis: SectorBasis) -> DickeLadder:
    N, m = basis.n_ions, basis.n_quanta
    states = tuple(dicke_state(basis, m - mu) for mu in range(m, -1, -1))
    for mu in range(1, m + 1):
        v = build_coupling_block(basis, mu).matrix().astype(float)
        eig = (m - mu + 1) * (N - m + mu)
        upper = states[m - mu].amplitudes[basis.manifold_slice(mu)]
        lower = states[m - mu + 1].amplitudes[basis.manifold_slice(mu - 1)]
        res_up = np.max(np.abs(v @ (v.T @ upper) - eig * upper))
        res_lo = np.max(np.abs(v.T @ (v @ lower) - eig * lower))
        if max(res_up, res_lo) > EIGEN_TOLERANCE:
            raise ArithmeticError(
                f"symmetric state at mu={mu} is not an eigenvector (residual {max(res_up, res_lo):.3g})"
            )
    base = dicke_ladder(N, m)
    return DickeLadder(N, m, base.couplings, base.detunings, states)
