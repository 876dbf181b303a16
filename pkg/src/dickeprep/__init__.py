"""Adiabatic creation of symmetric Dicke states of trapped ions."""

from .errors import BasisMismatch, DimensionCap, IntegrationFailure, InvalidArgs, NotInSector
from .hamiltonian import HamiltonianOperator, apply_hamiltonian, build_coupling_block, build_hamiltonian
from .morris_shore import DickeLadder, build_dicke_ladder, ladder_couplings, verify_ms_conditions
from .propagator import IntegratorConfig, SimulationTrace, evolve_full, evolve_ladder, fidelity
from .protocol import heating_estimate, run_protocol, sweep_intensity, sweep_parameter
from .pulse import LabParams, PulseParams, adiabaticity_margins, delta, omega, trap_constraint_check
from .subspace import SectorBasis, StateVector, dicke_state, enumerate_sector, product_state

__all__ = [name for name in dir() if not name.startswith("_")]
