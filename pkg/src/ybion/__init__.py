"""ybion: resonant photoionization of a trapped Yb+ ion, end to end.

The package models the promotion of a single trapped, laser-cooled
ytterbium ion to its doubly charged state and the measurements that prove
it happened:

  * scheme    -- atomic level/decay/drive data and its file format
  * rates     -- rate-equation population dynamics and steady states
  * photoion  -- beam flux, ionization rate, quantum-defect cross sections
  * crystal   -- two-ion mixed-charge crystal statics and normal modes
  * spectro   -- frequency scans, Lorentzian fits, lifetime extraction
  * mc        -- chopped-sequence Monte Carlo and synthetic verification
  * cli       -- `ybion` command-line front end

Everything numerical is deterministic given explicit seeds.
"""

from .constants import (
    CONSTANTS,
    MEGABARN_M2,
    RYDBERG_EV,
    RYDBERG_YB174_CM1,
    YB174_MASS_KG,
    photon_energy_ev,
    photon_energy_j,
    vacuum_wavelength_nm,
    wavenumber_to_ev,
)
from .crystal import (
    ChargePair,
    CrystalState,
    TrapAxis,
    crystal_state,
    displacement_ratio,
    equilibrium_positions,
    infer_charge,
    infer_eta,
    normal_mode_frequencies,
)
from .errors import SchemeError, SolverError, YbionError
from .mc import (
    REPORTED_NOISE,
    ChargeInference,
    IonizationRun,
    SequenceConfig,
    SequenceSummary,
    VerificationNoise,
    VerificationRecord,
    infer_from_verification,
    simulate_ionization_times,
    summarize_times,
    synthesize_verification,
)
from .photoion import (
    CrossSection,
    GaussianBeam,
    RydbergSeries,
    cross_section,
    effective_quantum_number,
    fit_quantum_defect,
    ionization_rate,
    photon_flux,
    rate_coefficient,
)
from .rates import (
    PopulationVector,
    RateMatrix,
    build_rate_matrix,
    evolve,
    excitation_probability,
    initial_population,
    natural_fwhm_hz,
    saturation_from_power,
    steady_state,
)
from .scheme import (
    DecayChannel,
    LaserDrive,
    Level,
    LevelScheme,
    load_bundled_scheme,
    load_scheme,
    load_scheme_file,
    serialize,
    transition_wavelength_nm,
    validate_scheme,
)
from .spectro import (
    LorentzianFit,
    ScanCurve,
    fit_lorentzian,
    lifetime_from_linewidth,
    load_curve,
    save_curve,
    simulate_scan,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # constants
    "CONSTANTS",
    "MEGABARN_M2",
    "RYDBERG_EV",
    "RYDBERG_YB174_CM1",
    "YB174_MASS_KG",
    "photon_energy_ev",
    "photon_energy_j",
    "vacuum_wavelength_nm",
    "wavenumber_to_ev",
    # errors
    "YbionError",
    "SchemeError",
    "SolverError",
    # scheme
    "Level",
    "DecayChannel",
    "LaserDrive",
    "LevelScheme",
    "load_scheme",
    "load_scheme_file",
    "load_bundled_scheme",
    "serialize",
    "validate_scheme",
    "transition_wavelength_nm",
    # rates
    "RateMatrix",
    "PopulationVector",
    "build_rate_matrix",
    "steady_state",
    "evolve",
    "initial_population",
    "excitation_probability",
    "natural_fwhm_hz",
    "saturation_from_power",
    # photoion
    "GaussianBeam",
    "CrossSection",
    "RydbergSeries",
    "photon_flux",
    "ionization_rate",
    "rate_coefficient",
    "effective_quantum_number",
    "fit_quantum_defect",
    "cross_section",
    # crystal
    "TrapAxis",
    "ChargePair",
    "CrystalState",
    "equilibrium_positions",
    "displacement_ratio",
    "normal_mode_frequencies",
    "infer_eta",
    "infer_charge",
    "crystal_state",
    # spectro
    "ScanCurve",
    "LorentzianFit",
    "simulate_scan",
    "fit_lorentzian",
    "lifetime_from_linewidth",
    "save_curve",
    "load_curve",
    # mc
    "SequenceConfig",
    "IonizationRun",
    "SequenceSummary",
    "VerificationNoise",
    "VerificationRecord",
    "ChargeInference",
    "REPORTED_NOISE",
    "simulate_ionization_times",
    "summarize_times",
    "synthesize_verification",
    "infer_from_verification",
]
