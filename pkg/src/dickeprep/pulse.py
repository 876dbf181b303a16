"""Complex-sech chirped pulses, the adiabaticity window, and lab-unit checks.

Simulation time is measured in units of the pulse timescale ``T``; the
pulse is described by the dimensionless products ``omega0_T`` and
``delta0_T``. ``omega`` is always the effective (collective) Rabi frequency,
``eta * bare_rabi / sqrt(N)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log, pi, sqrt

import numpy as np

from .errors import InvalidArgs

# Peak effective Rabi frequency must stay below nu_trap / this factor.
TRAP_FREQUENCY_FRACTION = 10.0
# Numerical prefactor in the Lamb-Dicke validity condition nu^2 >> (2.6 eta Omega')^2 / N.
LAMB_DICKE_PREFACTOR = 2.6


@dataclass(frozen=True)
class PulseParams:
    omega0_T: float = 10.0
    delta0_T: float = 6.0
    T: float = 1.0
    window_halfwidth: float = 10.0
    center: float = 0.0

    def __post_init__(self):
        if not self.omega0_T > 0:
            raise InvalidArgs("omega0_T must be positive")
        if not self.delta0_T >= 0:
            raise InvalidArgs("delta0_T must be non-negative")
        if not self.window_halfwidth > 0:
            raise InvalidArgs("window_halfwidth must be positive")
        if not self.T > 0:
            raise InvalidArgs("T must be positive")

    @property
    def t_start(self) -> float:
        return self.center - self.window_halfwidth

    @property
    def t_end(self) -> float:
        return self.center + self.window_halfwidth


@dataclass(frozen=True)
class LabParams:
    eta: float
    nu_trap: float
    bare_rabi: float | None
    n_ions: int
    heating_rate: float = 5.0

    def __post_init__(self):
        for name in ("eta", "nu_trap", "n_ions", "heating_rate"):
            if not getattr(self, name) > 0:
                raise InvalidArgs(f"{name} must be positive")
        if self.bare_rabi is not None and not self.bare_rabi > 0:
            raise InvalidArgs("bare_rabi must be positive")

    @property
    def effective_rabi(self) -> float:
        if self.bare_rabi is None:
            raise InvalidArgs("bare_rabi is required for the trap constraint")
        return self.eta * self.bare_rabi / sqrt(self.n_ions)


# Times below are in units of T, so the pulse amplitudes are omega0_T and delta0_T.
def omega(pulse: PulseParams, t):
    # sech written with exp(-|x|) so the tails underflow to 0 instead of overflowing
    e = np.exp(-np.abs(np.subtract(t, pulse.center)))
    return pulse.omega0_T * 2.0 * e / (1.0 + e * e)


def delta(pulse: PulseParams, t):
    return pulse.delta0_T * np.tanh(np.subtract(t, pulse.center))


@dataclass(frozen=True)
class AdiabaticityMargins:
    """Both sides of the complex-sech adiabaticity window.

    ``coupling_ratio`` is ``(pi*Omega0*T)^2 / (2 ln(1/eps))`` over
    ``pi*Delta0*T``; ``chirp_ratio`` is ``pi*Delta0*T`` over ``m ln(1/eps)``.
    A ratio of at least one means that inequality holds.
    """

    coupling_ok: bool
    chirp_ok: bool
    coupling_ratio: float
    chirp_ratio: float
    coupling_bound: float
    chirp_term: float
    excitation_bound: float

    @property
    def ok(self) -> bool:
        return self.coupling_ok and self.chirp_ok


def adiabaticity_margins(pulse: PulseParams, m: int, N: int, epsilon: float) -> AdiabaticityMargins:
    # N enters only through the effective Rabi frequency already folded into omega0_T.
    if not 0 < epsilon < 1:
        raise InvalidArgs("epsilon must lie in (0, 1)")
    if m < 0 or N < 1:
        raise InvalidArgs("need N >= 1 and m >= 0")
    ln_inv = log(1.0 / epsilon)
    upper = (pi * pulse.omega0_T) ** 2 / (2.0 * ln_inv)
    middle = pi * pulse.delta0_T
    lower = m * ln_inv
    coupling_ratio = upper / middle if middle > 0 else float("inf")
    chirp_ratio = middle / lower if lower > 0 else float("inf")
    return AdiabaticityMargins(
        coupling_ok=upper >= middle,
        chirp_ok=middle >= lower,
        coupling_ratio=coupling_ratio,
        chirp_ratio=chirp_ratio,
        coupling_bound=upper,
        chirp_term=middle,
        excitation_bound=lower,
    )


@dataclass(frozen=True)
class TrapCheck:
    ok: bool
    margin: float
    lamb_dicke_ratio: float


def trap_constraint_check(lab: LabParams) -> TrapCheck:
    """Peak effective Rabi frequency against ``nu_trap / 10``.

    ``margin`` is ``Omega_eff / (nu_trap / 10)``; the check passes at
    ``margin <= 1``. ``lamb_dicke_ratio`` is ``nu^2 N / (2.6 eta Omega')^2``,
    which should be large.
    """
    limit = lab.nu_trap / TRAP_FREQUENCY_FRACTION
    margin = lab.effective_rabi / limit
    ratio = lab.nu_trap**2 * lab.n_ions / (LAMB_DICKE_PREFACTOR * lab.eta * lab.bare_rabi) ** 2
    return TrapCheck(ok=margin <= 1.0, margin=margin, lamb_dicke_ratio=ratio)


def minimum_pulse_time(omega0_T: float, nu_trap: float) -> float:
    """Shortest T for which Omega0 = omega0_T / T respects the trap bound."""
    return omega0_T * TRAP_FREQUENCY_FRACTION / nu_trap
