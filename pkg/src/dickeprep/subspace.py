"""Conserved-excitation sector of N two-level ions plus one bus mode.

A basis ket is an ion occupation pattern (bit ``j`` set means ion ``j+1`` is
in ``|1>``) together with a phonon count. Within a sector of ``m`` quanta the
kets are grouped into manifolds of fixed phonon number ``mu``, ordered from
``mu = m`` down to ``mu = 0`` so that the unique Fock-end state sits at
index 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb, sqrt
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import BasisMismatch, DimensionCap, InvalidArgs, NotInSector

DEFAULT_DIMENSION_CAP = 200_000

IonPattern = Union[int, str, Sequence[int]]


@dataclass(frozen=True, order=True)
class IonPhononState:
    ions: int
    phonons: int

    @property
    def excitations(self) -> int:
        return self.ions.bit_count() + self.phonons

    def label(self, n_ions: int) -> str:
        occ = ",".join(str((self.ions >> j) & 1) for j in range(n_ions))
        return f"|{occ}>|{self.phonons}>"


def sector_dimension(n_ions: int, n_quanta: int) -> int:
    return sum(comb(n_ions, n_quanta - mu) for mu in range(n_quanta + 1))


def patterns_with_popcount(n_ions: int, k: int) -> list[int]:
    """All n-bit integers with exactly k bits set, ascending."""
    out = []
    for bits in itertools.combinations(range(n_ions), k):
        x = 0
        for b in bits:
            x |= 1 << b
        out.append(x)
    out.sort()
    return out


def parse_pattern(ions: IonPattern, n_ions: int) -> int:
    """Normalise an ion pattern to its integer form.

    Integers are taken as-is. Strings such as ``"110000"`` and sequences such
    as ``(1, 1, 0, 0, 0, 0)`` list ion 1 first, so both of those map to
    ``0b000011``.
    """
    if isinstance(ions, (int, np.integer)):
        value = int(ions)
        if value < 0 or value >= (1 << n_ions):
            raise InvalidArgs(f"ion pattern {value} does not fit in {n_ions} ions")
        return value
    if isinstance(ions, str):
        ions = ions.strip().strip("|>").replace(",", "")
        digits = [int(c) for c in ions]
    else:
        digits = [int(c) for c in ions]
    if len(digits) != n_ions or any(d not in (0, 1) for d in digits):
        raise InvalidArgs(f"expected {n_ions} occupations of 0/1, got {ions!r}")
    return sum(d << j for j, d in enumerate(digits))


@dataclass(frozen=True, eq=False)
class SectorBasis:
    n_ions: int
    n_quanta: int
    states: tuple[IonPhononState, ...]
    manifold_offsets: tuple[int, ...]
    _index: dict = field(repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    def manifold_slice(self, mu: int) -> slice:
        """Index range of the ``mu``-phonon manifold."""
        if not 0 <= mu <= self.n_quanta:
            raise InvalidArgs(f"manifold {mu} outside 0..{self.n_quanta}")
        k = self.n_quanta - mu
        return slice(self.manifold_offsets[k], self.manifold_offsets[k + 1])

    def index_of(self, ions: IonPattern, phonons: int) -> int:
        key = (parse_pattern(ions, self.n_ions), int(phonons))
        try:
            return self._index[key]
        except KeyError:
            raise NotInSector(
                f"{IonPhononState(*key).label(self.n_ions)} has "
                f"{key[0].bit_count() + key[1]} quanta, sector has {self.n_quanta}"
            ) from None

    def state_at(self, i: int) -> IonPhononState:
        return self.states[i]

    def phonon_numbers(self) -> np.ndarray:
        return np.array([s.phonons for s in self.states], dtype=int)

    def labels(self) -> list[str]:
        return [s.label(self.n_ions) for s in self.states]

    def permutation_indices(self, perm: Sequence[int]) -> np.ndarray:
        """Index map for relabelling ions: ion ``j`` moves to slot ``perm[j]``.

        Returns ``p`` with ``new_vec[p[i]] = old_vec[i]``.
        """
        perm = list(perm)
        if sorted(perm) != list(range(self.n_ions)):
            raise InvalidArgs(f"{perm} is not a permutation of {self.n_ions} ions")
        out = np.empty(self.dim, dtype=int)
        for i, s in enumerate(self.states):
            moved = 0
            for j in range(self.n_ions):
                if (s.ions >> j) & 1:
                    moved |= 1 << perm[j]
            out[i] = self._index[(moved, s.phonons)]
        return out


def enumerate_sector(n_ions: int, n_quanta: int, cap: int = DEFAULT_DIMENSION_CAP) -> SectorBasis:
    if n_ions < 1:
        raise InvalidArgs("ions must be at least 1")
    if n_quanta < 0:
        raise InvalidArgs("excitations must be non-negative")
    if n_quanta > n_ions:
        raise InvalidArgs("excitations must not exceed ions")
    dim = sector_dimension(n_ions, n_quanta)
    if dim > cap:
        raise DimensionCap(f"sector N={n_ions}, m={n_quanta} has {dim} states (cap {cap})")

    states: list[IonPhononState] = []
    offsets = [0]
    for mu in range(n_quanta, -1, -1):
        states.extend(IonPhononState(p, mu) for p in patterns_with_popcount(n_ions, n_quanta - mu))
        offsets.append(len(states))
    index = {(s.ions, s.phonons): i for i, s in enumerate(states)}
    return SectorBasis(n_ions, n_quanta, tuple(states), tuple(offsets), index)


@dataclass(frozen=True, eq=False)
class LadderBasis:
    """The (m+1)-level symmetric Dicke ladder; level index ``mu`` is stored
    at position ``m - mu`` to match the sector ordering."""

    n_ions: int
    n_quanta: int

    @property
    def dim(self) -> int:
        return self.n_quanta + 1

    @property
    def manifold_offsets(self) -> tuple[int, ...]:
        return tuple(range(self.n_quanta + 2))

    def manifold_slice(self, mu: int) -> slice:
        if not 0 <= mu <= self.n_quanta:
            raise InvalidArgs(f"level {mu} outside 0..{self.n_quanta}")
        k = self.n_quanta - mu
        return slice(k, k + 1)

    def phonon_numbers(self) -> np.ndarray:
        return np.arange(self.n_quanta, -1, -1)

    def labels(self) -> list[str]:
        m = self.n_quanta
        return [f"|W_{m - mu}^{self.n_ions}>|{mu}>" for mu in range(m, -1, -1)]


@dataclass(frozen=True, eq=False)
class StateVector:
    basis: SectorBasis | LadderBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.basis.dim,):
            raise BasisMismatch(f"amplitude shape {amps.shape} != basis dim {self.basis.dim}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def manifold_populations(self) -> np.ndarray:
        """Populations per phonon number, index ``mu``."""
        return manifold_sums(self.basis, self.populations())

    def permuted(self, perm: Sequence[int]) -> "StateVector":
        p = self.basis.permutation_indices(perm)
        out = np.empty_like(self.amplitudes)
        out[p] = self.amplitudes
        return StateVector(self.basis, out)


def check_same_basis(a, b) -> None:
    """Raise BasisMismatch unless ``a`` and ``b`` describe the same space."""
    if a is b:
        return
    if type(a) is not type(b) or (a.n_ions, a.n_quanta) != (b.n_ions, b.n_quanta):
        raise BasisMismatch(
            f"basis N={a.n_ions}, m={a.n_quanta} does not match N={b.n_ions}, m={b.n_quanta}"
        )


def manifold_sums(basis, populations: np.ndarray) -> np.ndarray:
    """Sum the last axis of ``populations`` over each manifold, indexed by mu."""
    populations = np.asarray(populations)
    m = basis.n_quanta
    out = np.empty(populations.shape[:-1] + (m + 1,))
    for mu in range(m + 1):
        out[..., mu] = populations[..., basis.manifold_slice(mu)].sum(axis=-1)
    return out


def dicke_state(basis: SectorBasis, k: int) -> StateVector:
    """|W_k^N>|m-k>: equal weight on every k-excitation pattern."""
    if not 0 <= k <= basis.n_quanta:
        raise InvalidArgs(f"Dicke excitation {k} outside 0..{basis.n_quanta}")
    amps = np.zeros(basis.dim, dtype=complex)
    sl = basis.manifold_slice(basis.n_quanta - k)
    amps[sl] = 1.0 / sqrt(comb(basis.n_ions, k))
    return StateVector(basis, amps)


def product_state(basis: SectorBasis, ions: IonPattern, phonons: int) -> StateVector:
    amps = np.zeros(basis.dim, dtype=complex)
    amps[basis.index_of(ions, phonons)] = 1.0
    return StateVector(basis, amps)


def embed_state(psi: StateVector, target: SectorBasis, ion_slots: Iterable[int] | None = None) -> StateVector:
    """Embed a state of a smaller ion register into a larger sector.

    Ion ``j`` of ``psi`` is placed at ion ``ion_slots[j]`` of ``target``
    (default: the first ions); the remaining ions are in ``|0>``.
    """
    src = psi.basis
    if not isinstance(src, SectorBasis):
        raise BasisMismatch("can only embed sector states")
    if src.n_quanta != target.n_quanta:
        raise BasisMismatch("embedding must preserve the excitation number")
    slots = list(range(src.n_ions)) if ion_slots is None else list(ion_slots)
    if len(slots) != src.n_ions or len(set(slots)) != len(slots):
        raise InvalidArgs("ion_slots must name distinct target ions, one per source ion")
    amps = np.zeros(target.dim, dtype=complex)
    for i, s in enumerate(src.states):
        moved = 0
        for j in range(src.n_ions):
            if (s.ions >> j) & 1:
                moved |= 1 << slots[j]
        amps[target.index_of(moved, s.phonons)] = psi.amplitudes[i]
    return StateVector(target, amps)
