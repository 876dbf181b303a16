"""Time-dependent Schroedinger integration over one pulse stage.

Two integrators are available. ``adaptive`` is an embedded Dormand-Prince
5(4) pair with error control (scipy's ``RK45``). ``unitary`` is a fixed-step
exponential-midpoint scheme, ``psi <- exp(-i H(t + dt/2) dt) psi``, which is
norm-exact and serves as an independent cross-check.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp

from .errors import IntegrationFailure, InvalidArgs
from .hamiltonian import HamiltonianOperator
from .morris_shore import dicke_ladder
from .pulse import PulseParams
from .subspace import LadderBasis, StateVector, check_same_basis, manifold_sums

DENSE_EXPM_LIMIT = 64
METHODS = ("adaptive", "unitary")


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "adaptive"
    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    max_step: float = 0.01
    trace_samples: int = 1000

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidArgs(f"method must be one of {METHODS}, got {self.method!r}")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise InvalidArgs("tolerances must be positive")
        if not self.max_step > 0:
            raise InvalidArgs("max_step must be positive")
        if int(self.trace_samples) != self.trace_samples or self.trace_samples < 2:
            raise InvalidArgs("trace_samples must be an integer >= 2")


@dataclass(frozen=True, eq=False)
class SimulationTrace:
    times: np.ndarray
    populations: np.ndarray
    manifold_populations: np.ndarray
    fidelity: np.ndarray
    final_state: StateVector
    labels: list[str] = field(default_factory=list)

    @property
    def final_fidelity(self) -> float:
        return float(self.fidelity[-1])

    def csv_header(self) -> list[str]:
        d = self.populations.shape[1]
        m1 = self.manifold_populations.shape[1]
        return (
            ["t_over_T"]
            + [f"p_state_{i}" for i in range(d)]
            + [f"p_manifold_{mu}" for mu in range(m1)]
            + ["fidelity"]
        )

    def to_csv(self, stream=None) -> str | None:
        """Write the trace; floats use the shortest round-trip repr."""
        out = io.StringIO() if stream is None else stream
        w = csv.writer(out, lineterminator="\n")
        w.writerow(self.csv_header())
        for k in range(len(self.times)):
            row = [self.times[k], *self.populations[k], *self.manifold_populations[k], self.fidelity[k]]
            w.writerow([repr(float(x)) for x in row])
        return out.getvalue() if stream is None else None

    def to_dict(self) -> dict:
        amps = self.final_state.amplitudes
        return {
            "times": self.times.tolist(),
            "labels": list(self.labels),
            "populations": self.populations.tolist(),
            "manifold_populations": self.manifold_populations.tolist(),
            "fidelity": self.fidelity.tolist(),
            "final_fidelity": self.final_fidelity,
            "final_state": {"real": amps.real.tolist(), "imag": amps.imag.tolist()},
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def fidelity(a: StateVector, b: StateVector) -> float:
    check_same_basis(a.basis, b.basis)
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def _sample_times(t0: float, t1: float, n: int) -> np.ndarray:
    return np.linspace(t0, t1, int(n))


def integrate(
    matvec: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    times: np.ndarray,
    cfg: IntegratorConfig,
    matrix: Callable[[float], np.ndarray] | None = None,
    sparse: Callable[[float], object] | None = None,
) -> np.ndarray:
    """Solve i dy/dt = H(t) y and return y at every entry of ``times``.

    ``matvec(t, y)`` gives H(t) y. The unitary method needs ``matrix(t)``
    (dense, small systems) or ``sparse(t)`` for larger ones.
    """
    y0 = np.asarray(y0, dtype=complex)
    if cfg.method == "adaptive":
        return _integrate_adaptive(matvec, y0, times, cfg)
    return _integrate_unitary(y0, times, cfg, matrix, sparse)


def _integrate_adaptive(matvec, y0, times, cfg) -> np.ndarray:
    sol = solve_ivp(
        lambda t, y: -1j * matvec(t, y),
        (times[0], times[-1]),
        y0,
        method="RK45",
        t_eval=times,
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        max_step=cfg.max_step,
    )
    if sol.status != 0 or sol.y.shape[1] != len(times):
        raise IntegrationFailure(sol.message)
    return sol.y.T


def _integrate_unitary(y0, times, cfg, matrix, sparse) -> np.ndarray:
    dim = y0.shape[0]
    use_dense = matrix is not None and (dim <= DENSE_EXPM_LIMIT or sparse is None)
    if not use_dense and sparse is None:
        raise InvalidArgs("unitary method needs a dense or sparse Hamiltonian")
    out = np.empty((len(times), dim), dtype=complex)
    out[0] = y0
    y = y0.copy()
    for k in range(1, len(times)):
        t_a, t_b = times[k - 1], times[k]
        n = max(1, math.ceil((t_b - t_a) / cfg.max_step - 1e-12))
        dt = (t_b - t_a) / n
        for s in range(n):
            t_mid = t_a + (s + 0.5) * dt
            if use_dense:
                e, v = np.linalg.eigh(matrix(t_mid))
                y = v @ (np.exp(-1j * dt * e) * (v.conj().T @ y))
            else:
                y = spla.expm_multiply(-1j * dt * sparse(t_mid), y)
        out[k] = y
    return out


def _trace(basis, samples, times, target_amps, labels) -> SimulationTrace:
    pops = np.abs(samples) ** 2
    fid = np.abs(samples @ target_amps.conj()) ** 2
    # same expression as fidelity(), so the last sample matches it exactly
    fid[-1] = abs(np.vdot(target_amps, samples[-1])) ** 2
    return SimulationTrace(
        times=times,
        populations=pops,
        manifold_populations=manifold_sums(basis, pops),
        fidelity=fid,
        final_state=StateVector(basis, samples[-1]),
        labels=labels,
    )


def evolve_full(
    op: HamiltonianOperator,
    pulse: PulseParams,
    psi0: StateVector,
    target: StateVector,
    cfg: IntegratorConfig | None = None,
) -> SimulationTrace:
    """Propagate ``psi0`` across the stage window ``center +/- window_halfwidth``."""
    cfg = cfg or IntegratorConfig()
    check_same_basis(psi0.basis, op.basis)
    check_same_basis(target.basis, op.basis)
    times = _sample_times(pulse.t_start, pulse.t_end, cfg.trace_samples)
    samples = integrate(
        lambda t, y: op.matvec(t, pulse, y),
        psi0.amplitudes,
        times,
        cfg,
        matrix=(lambda t: op.matrix(t, pulse)) if op.dim <= DENSE_EXPM_LIMIT else None,
        sparse=lambda t: op.sparse_matrix(t, pulse),
    )
    return _trace(op.basis, samples, times, target.amplitudes, op.basis.labels())


def evolve_ladder(
    N: int,
    m: int,
    pulse: PulseParams,
    start_level: int,
    cfg: IntegratorConfig | None = None,
    target_level: int | None = None,
) -> SimulationTrace:
    """Propagate inside the symmetric (m+1)-level ladder.

    Levels are labelled by phonon number. ``target_level`` defaults to the
    opposite end of the chain from ``start_level``.
    """
    cfg = cfg or IntegratorConfig()
    if not 0 <= start_level <= m:
        raise InvalidArgs(f"start_level {start_level} outside 0..{m}")
    if target_level is None:
        target_level = 0 if start_level == m else m
    if not 0 <= target_level <= m:
        raise InvalidArgs(f"target_level {target_level} outside 0..{m}")
    ladder = dicke_ladder(N, m)
    basis = LadderBasis(N, m)
    y0 = np.zeros(m + 1, dtype=complex)
    y0[basis.manifold_slice(start_level)] = 1.0
    target = np.zeros(m + 1, dtype=complex)
    target[basis.manifold_slice(target_level)] = 1.0
    times = _sample_times(pulse.t_start, pulse.t_end, cfg.trace_samples)
    samples = integrate(
        lambda t, y: ladder.matrix(t, pulse) @ y,
        y0,
        times,
        cfg,
        matrix=lambda t: ladder.matrix(t, pulse),
    )
    return _trace(basis, samples, times, target, basis.labels())
