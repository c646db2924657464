"""Physical constants and unit helpers shared across the package.

All values are CODATA (as shipped with scipy.constants). Spectroscopic
level energies are carried in cm^-1 throughout; every conversion to SI
lives here so the conventions cannot drift between modules.
"""

from __future__ import annotations

from dataclasses import dataclass

import scipy.constants as _const

__all__ = [
    "PhysicalConstants",
    "CONSTANTS",
    "MEGABARN_M2",
    "YB174_MASS_KG",
    "RYDBERG_YB174_CM1",
    "photon_energy_j",
    "photon_energy_ev",
    "wavenumber_to_ev",
    "vacuum_wavelength_nm",
]


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants in SI, plus the Rydberg constant in cm^-1.

    Frozen so a constructed instance can be shared freely; the module-level
    ``CONSTANTS`` singleton is what the rest of the package uses.
    """

    elementary_charge: float = _const.e            # C
    vacuum_permittivity: float = _const.epsilon_0  # F/m
    planck_constant: float = _const.h              # J s
    speed_of_light: float = _const.c               # m/s
    rydberg_energy: float = _const.Rydberg / 100.0  # cm^-1, infinite nuclear mass
    atomic_mass_unit: float = _const.u             # kg
    electron_mass: float = _const.m_e              # kg
    bohr_radius: float = _const.physical_constants["Bohr radius"][0]  # m
    fine_structure: float = _const.fine_structure

    def rydberg_for_mass(self, nucleus_mass_kg: float) -> float:
        """Mass-corrected Rydberg constant in cm^-1 for a finite-mass core."""
        if nucleus_mass_kg <= 0:
            raise ValueError("nucleus mass must be positive")
        return self.rydberg_energy / (1.0 + self.electron_mass / nucleus_mass_kg)


CONSTANTS = PhysicalConstants()

# 1 Mb = 1e-18 cm^2; photoionization cross sections are quoted in this unit.
MEGABARN_M2 = 1e-22  # m^2

# Isotope mass of 174Yb (atomic mass evaluation), used both for the trap
# dynamics default and for the mass-corrected Rydberg constant.
YB174_MASS_KG = 173.9388664 * CONSTANTS.atomic_mass_unit

RYDBERG_YB174_CM1 = CONSTANTS.rydberg_for_mass(YB174_MASS_KG)

# Rydberg energy in eV, for threshold arithmetic on effective quantum numbers.
RYDBERG_EV = (
    CONSTANTS.rydberg_energy * 100.0 * CONSTANTS.planck_constant
    * CONSTANTS.speed_of_light / CONSTANTS.elementary_charge
)


def photon_energy_j(wavelength_nm: float) -> float:
    """Photon energy h*c/lambda in joules for a vacuum wavelength in nm."""
    if wavelength_nm <= 0:
        raise ValueError("wavelength must be positive")
    return CONSTANTS.planck_constant * CONSTANTS.speed_of_light / (wavelength_nm * 1e-9)


def photon_energy_ev(wavelength_nm: float) -> float:
    return photon_energy_j(wavelength_nm) / CONSTANTS.elementary_charge


def wavenumber_to_ev(energy_cm1: float) -> float:
    """Convert a term energy in cm^-1 to eV."""
    return (
        energy_cm1 * 100.0 * CONSTANTS.planck_constant * CONSTANTS.speed_of_light
        / CONSTANTS.elementary_charge
    )


def vacuum_wavelength_nm(delta_energy_cm1: float) -> float:
    """Vacuum wavelength in nm of a transition with energy gap in cm^-1."""
    if delta_energy_cm1 <= 0:
        raise ValueError("energy gap must be positive")
    return 1e7 / delta_energy_cm1
