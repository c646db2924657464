"""Two-ion mixed-charge crystal: positions, modes, and inverse problems.

A singly charged bright ion (index 1) shares a linear trap axis with a
companion of unknown charge q2 (index 2). Both ions have the same mass.
The trap is characterized not by its voltages but by two measurables: the
axial secular frequency nu1 a single singly charged ion would have, and the
ratio eta = nu2/nu1 of the companion's single-particle frequency to it.
eta is an input, never derived from q2: static stray fields shift it away
from the pure-RF expectation, and those fields are not modeled here.

Closed forms used throughout (Q = q1 q2 e^2 / (4 pi eps0), w1 = 2 pi nu1):

    X1^3 = Q / ((1 + eta^-2)^2 M w1^2)        X2 = -eta^-2 X1

    u_pm = (eta^4 + 6 eta^2 + 1 +- sqrt(eta^8 + 14 eta^4 + 1))
           / (2 eta^2 + 2)

    nu_com = nu1 sqrt(u_minus)      nu_bre = nu1 sqrt(u_plus)

u_pm are the normal-mode eigenvalues in units of w1^2, so the mode
frequencies carry a square root. That placement is confirmed against an
independent stiffness-matrix eigenvalue computation in the test suite: at
eta = 1 the breathing mode must come out at sqrt(3) nu1, not 3 nu1.

The two inverse problems mirror the verification protocol: infer_eta
recovers eta from one measured mode frequency, and infer_charge recovers
q2 from the normalized displacement of the bright ion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .constants import CONSTANTS, YB174_MASS_KG
from .errors import SchemeError, SolverError

__all__ = [
    "TrapAxis",
    "ChargePair",
    "CrystalState",
    "equilibrium_positions",
    "displacement_ratio",
    "normal_mode_frequencies",
    "infer_eta",
    "infer_charge",
    "crystal_state",
]

ETA_BRACKET = (1.0, 10.0)


@dataclass(frozen=True)
class TrapAxis:
    """Axial trap seen by the ion pair.

    nu1_hz is the secular frequency of a single singly charged ion of mass
    ion_mass_kg; eta scales it to the companion's single-particle frequency.
    """

    nu1_hz: float
    eta: float
    ion_mass_kg: float = YB174_MASS_KG

    def __post_init__(self):
        if self.nu1_hz <= 0:
            raise SchemeError("nu1 must be positive")
        if self.ion_mass_kg <= 0:
            raise SchemeError("ion mass must be positive")
        if self.eta <= 0:
            raise SchemeError("eta must be positive")

    @property
    def omega1(self) -> float:
        return 2.0 * np.pi * self.nu1_hz


@dataclass(frozen=True)
class ChargePair:
    """Charges of the two ions in units of e; ion 1 is the bright singly
    charged reference, so q1 is pinned to 1."""

    q2: float
    q1: float = 1.0

    def __post_init__(self):
        if self.q1 != 1.0:
            raise SchemeError("ion 1 is the singly charged reference; q1 must be 1")
        if self.q2 <= 0:
            raise SchemeError("q2 must be positive")


@dataclass(frozen=True)
class CrystalState:
    """Equilibrium positions (m) and axial mode frequencies (Hz)."""

    x1_m: float
    x2_m: float
    nu_com_hz: float
    nu_bre_hz: float

    def __post_init__(self):
        if not self.x1_m > 0 > self.x2_m:
            raise SchemeError("expected X1 > 0 > X2 for the two-ion equilibrium")
        if not self.nu_bre_hz > self.nu_com_hz > 0:
            raise SchemeError("mode frequencies must satisfy nu_bre > nu_com > 0")


def _coulomb_q(charges: ChargePair) -> float:
    e = CONSTANTS.elementary_charge
    return (
        charges.q1 * charges.q2 * e**2
        / (4.0 * np.pi * CONSTANTS.vacuum_permittivity)
    )


def equilibrium_positions(trap: TrapAxis, charges: ChargePair) -> tuple[float, float]:
    """Equilibrium positions (X1, X2) in meters, X1 > 0 > X2."""
    q = _coulomb_q(charges)
    inv_eta2 = 1.0 / trap.eta**2
    x1 = (
        q / ((1.0 + inv_eta2) ** 2 * trap.ion_mass_kg * trap.omega1**2)
    ) ** (1.0 / 3.0)
    x2 = -inv_eta2 * x1
    return float(x1), float(x2)


def displacement_ratio(eta: float, q2: float) -> float:
    """X1(eta, q2) normalized to the equal-charge equal-frequency crystal.

    Closed form (4 q2 / (1 + eta^-2)^2)^(1/3); the cube root makes this a
    weak function of q2, which is why inverting it amplifies measurement
    noise threefold (see infer_charge).
    """
    if eta <= 0 or q2 <= 0:
        raise SchemeError("eta and q2 must be positive")
    inv_eta2 = 1.0 / eta**2
    return float((4.0 * q2 / (1.0 + inv_eta2) ** 2) ** (1.0 / 3.0))


def _mode_eigenvalues(eta: float) -> tuple[float, float]:
    """(u_minus, u_plus): squared mode frequencies in units of omega1^2."""
    root = np.sqrt(eta**8 + 14.0 * eta**4 + 1.0)
    base = eta**4 + 6.0 * eta**2 + 1.0
    denom = 2.0 * eta**2 + 2.0
    return float((base - root) / denom), float((base + root) / denom)


def normal_mode_frequencies(trap: TrapAxis) -> tuple[float, float]:
    """(nu_com, nu_bre) in Hz for the two axial modes."""
    u_minus, u_plus = _mode_eigenvalues(trap.eta)
    return (
        float(trap.nu1_hz * np.sqrt(u_minus)),
        float(trap.nu1_hz * np.sqrt(u_plus)),
    )


def infer_eta(nu_measured_hz: float, nu1_hz: float, mode: str) -> float:
    """Invert one measured mode frequency to eta on the bracket [1, 10].

    Both mode eigenvalues are strictly increasing in eta on the bracket, so
    the root is unique when it exists. Measurements below the eta = 1
    endpoint (nu1 for "com", sqrt(3) nu1 for "bre") or beyond the eta = 10
    endpoint are rejected.
    """
    if mode not in ("com", "bre"):
        raise SolverError(f"mode must be 'com' or 'bre', got {mode!r}")
    if nu_measured_hz <= 0 or nu1_hz <= 0:
        raise SolverError("frequencies must be positive")
    pick = 0 if mode == "com" else 1
    target = (nu_measured_hz / nu1_hz) ** 2

    def objective(eta: float) -> float:
        return _mode_eigenvalues(eta)[pick] - target

    lo, hi = ETA_BRACKET
    f_lo, f_hi = objective(lo), objective(hi)
    # Measurements exactly at an endpoint land a few ulps outside the
    # bracket; absorb that instead of rejecting the eta = 1 trivial case.
    edge = 1e-9 * max(1.0, abs(target))
    if f_lo > 0:
        if f_lo <= edge:
            return lo
        floor_hz = nu1_hz * np.sqrt(_mode_eigenvalues(lo)[pick])
        raise SolverError(
            f"measured {mode} frequency {nu_measured_hz:.1f} Hz lies below the "
            f"eta = 1 value {floor_hz:.1f} Hz"
        )
    if f_hi < 0:
        if -f_hi <= edge:
            return hi
        ceil_hz = nu1_hz * np.sqrt(_mode_eigenvalues(hi)[pick])
        raise SolverError(
            f"measured {mode} frequency {nu_measured_hz:.1f} Hz exceeds the "
            f"eta = {hi:.0f} value {ceil_hz:.1f} Hz"
        )
    eta = brentq(objective, lo, hi, xtol=1e-6)
    return float(eta)


def infer_charge(ratio: float, eta: float) -> float:
    """q2 in units of e from the measured displacement ratio at known eta.

    Exact inverse of displacement_ratio: q2 = ratio^3 (1 + eta^-2)^2 / 4.
    The cube propagates a relative error in the ratio threefold into q2.
    """
    if ratio <= 0 or eta <= 0:
        raise SchemeError("ratio and eta must be positive")
    inv_eta2 = 1.0 / eta**2
    return float(ratio**3 * (1.0 + inv_eta2) ** 2 / 4.0)


def crystal_state(trap: TrapAxis, charges: ChargePair) -> CrystalState:
    """Bundle positions and mode frequencies for one (trap, charges) point."""
    x1, x2 = equilibrium_positions(trap, charges)
    nu_com, nu_bre = normal_mode_frequencies(trap)
    return CrystalState(x1_m=x1, x2_m=x2, nu_com_hz=nu_com, nu_bre_hz=nu_bre)
