"""Beam flux, ionization rate, and quantum-defect cross-section tests."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ybion.constants import (
    MEGABARN_M2,
    RYDBERG_EV,
    RYDBERG_YB174_CM1,
    photon_energy_ev,
    photon_energy_j,
)
from ybion.errors import SchemeError, SolverError
from ybion.photoion import (
    SIGMA_KRAMERS_M2,
    CrossSection,
    GaussianBeam,
    RydbergSeries,
    bundled_series_path,
    cross_section,
    effective_quantum_number,
    fit_quantum_defect,
    ionization_rate,
    load_series_file,
    photon_flux,
    rate_coefficient,
)

# Reference operating point: the ionizing beam and the populations it acts on.
BEAM = GaussianBeam(power_w=100e-6, waist_m=10e-6, wavelength_nm=245.426)
P7P = 9.5e-3
SERIES_LIMIT_CM1 = 98207.0
SEVEN_P_CM1 = 63706.28

positive_powers = st.floats(min_value=1e-9, max_value=10.0)
waists = st.floats(min_value=1e-7, max_value=1e-2)
wavelengths = st.floats(min_value=100.0, max_value=2000.0)
probabilities = st.floats(min_value=0.0, max_value=1.0)
sigmas_mb = st.floats(min_value=1e-3, max_value=1e3)


# -- beam geometry and photon flux ------------------------------------------------


def test_zero_power_zero_flux():
    beam = GaussianBeam(power_w=0.0, waist_m=10e-6, wavelength_nm=245.426)
    assert photon_flux(beam) == 0.0


def test_reference_beam_numbers():
    # 100 uW into a 10 um waist: peak intensity 2P/(pi w0^2).
    assert BEAM.peak_intensity_w_m2 == pytest.approx(6.366e5, rel=1e-4)
    assert photon_energy_j(245.426) == pytest.approx(8.094e-19, rel=1e-4)
    assert photon_flux(BEAM) == pytest.approx(7.87e23, rel=1e-3)
    assert photon_flux(BEAM) == pytest.approx(7.86545697637769e23, rel=1e-12)


def test_doubling_waist_quarters_flux():
    wide = GaussianBeam(power_w=BEAM.power_w, waist_m=2 * BEAM.waist_m,
                        wavelength_nm=BEAM.wavelength_nm)
    assert photon_flux(wide) == pytest.approx(photon_flux(BEAM) / 4.0, rel=1e-14)


@given(power=positive_powers, waist=waists, wavelength=wavelengths)
@settings(max_examples=80)
def test_flux_definition_round_trip(power, waist, wavelength):
    # F * (pi w0^2 / 2) * E_ph recovers the beam power.
    beam = GaussianBeam(power_w=power, waist_m=waist, wavelength_nm=wavelength)
    back = (
        photon_flux(beam)
        * math.pi * waist**2 / 2.0
        * photon_energy_j(wavelength)
    )
    assert back == pytest.approx(power, rel=1e-12)


def test_beam_invariants():
    with pytest.raises(SchemeError):
        GaussianBeam(power_w=-1e-6, waist_m=1e-5, wavelength_nm=245.426)
    with pytest.raises(SchemeError):
        GaussianBeam(power_w=1e-6, waist_m=0.0, wavelength_nm=245.426)
    with pytest.raises(SchemeError):
        GaussianBeam(power_w=1e-6, waist_m=1e-5, wavelength_nm=-245.426)


# -- ionization rate and the rate-per-power coefficient ---------------------------


def test_reference_ionization_rate():
    sigma = CrossSection.from_megabarn(5.5)
    rate = ionization_rate(P7P, sigma, photon_flux(BEAM))
    assert rate == pytest.approx(4.1, rel=2e-2)
    assert rate == pytest.approx(4.109701270157343, rel=1e-12)


def test_rate_scales_to_larger_cross_section():
    sigma = CrossSection.from_megabarn(7.2)
    rate = ionization_rate(P7P, sigma, photon_flux(BEAM))
    assert rate == pytest.approx(5.4, rel=2e-2)
    assert rate == pytest.approx(5.37997257184234, rel=1e-12)


def test_zero_population_zero_rate():
    sigma = CrossSection.from_megabarn(5.5)
    assert ionization_rate(0.0, sigma, photon_flux(BEAM)) == 0.0
    assert rate_coefficient(0.0, sigma, 245.426) == 0.0


def test_reference_rate_coefficient():
    sigma = CrossSection.from_megabarn(5.5)
    coeff = rate_coefficient(P7P, sigma, 245.426)
    assert coeff == pytest.approx(4.1e-6, rel=2e-2)
    assert coeff == pytest.approx(4.1097012701573435e-06, rel=1e-12)


def test_coefficient_linear_in_cross_section():
    single = rate_coefficient(P7P, CrossSection.from_megabarn(5.5), 245.426)
    double = rate_coefficient(P7P, CrossSection.from_megabarn(11.0), 245.426)
    assert double == pytest.approx(2.0 * single, rel=1e-14)


@given(p=probabilities, sigma_mb=sigmas_mb, scale=st.floats(min_value=1e-3, max_value=1e3))
@settings(max_examples=80)
def test_rate_linearity(p, sigma_mb, scale):
    sigma = CrossSection.from_megabarn(sigma_mb)
    flux = 1e22
    base = ionization_rate(p, sigma, flux)
    assert ionization_rate(p, sigma, scale * flux) == pytest.approx(
        scale * base, rel=1e-12)
    assert ionization_rate(p, CrossSection.from_megabarn(scale * sigma_mb), flux) == (
        pytest.approx(scale * base, rel=1e-12))


@given(power=positive_powers, waist=waists)
@settings(max_examples=80)
def test_rate_and_coefficient_agree(power, waist):
    # c * P / w0^2 must equal p * sigma * F for the same beam.
    sigma = CrossSection.from_megabarn(5.5)
    beam = GaussianBeam(power_w=power, waist_m=waist, wavelength_nm=245.426)
    via_flux = ionization_rate(P7P, sigma, photon_flux(beam))
    via_coeff = rate_coefficient(P7P, sigma, 245.426) * power / waist**2
    assert via_coeff == pytest.approx(via_flux, rel=1e-12)


def test_rate_preconditions():
    sigma = CrossSection.from_megabarn(5.5)
    with pytest.raises(SchemeError):
        ionization_rate(1.5, sigma, 1e22)
    with pytest.raises(SchemeError):
        ionization_rate(0.5, sigma, -1e22)
    with pytest.raises(SchemeError):
        rate_coefficient(-0.1, sigma, 245.426)


# -- effective quantum number ------------------------------------------------------


def test_nstar_trivial_gaps():
    limit = 98207.0
    assert effective_quantum_number(limit - RYDBERG_YB174_CM1, limit) == 1.0
    assert effective_quantum_number(limit - RYDBERG_YB174_CM1 / 4.0, limit) == 2.0


def test_nstar_of_ionizing_level():
    nstar = effective_quantum_number(SEVEN_P_CM1, SERIES_LIMIT_CM1)
    assert nstar == pytest.approx(1.7834560120675202, rel=1e-12)
    # threshold photon energy R/n*^2 must sit below the 245.426 nm photon
    assert RYDBERG_EV / nstar**2 < photon_energy_ev(245.426)


def test_nstar_requires_bound_level():
    with pytest.raises(SolverError):
        effective_quantum_number(98207.0, 98207.0)
    with pytest.raises(SolverError):
        effective_quantum_number(99000.0, 98207.0)


# -- quantum-defect fits -----------------------------------------------------------


def synthetic_series(mu, ns, limit=80000.0, core_charge=1):
    z2r = core_charge**2 * RYDBERG_YB174_CM1
    members = tuple((n, limit - z2r / (n - mu) ** 2) for n in ns)
    return RydbergSeries(members=members, ionization_limit_cm1=limit,
                         ell=1, core_charge=core_charge)


def test_fit_recovers_zero_defect():
    series = synthetic_series(0.0, range(2, 7))
    mu, residual = fit_quantum_defect(series)
    assert abs(mu) < 1e-10
    assert residual <= 1e-8


def test_fit_recovers_half_defect():
    series = synthetic_series(0.5, range(3, 9))
    mu, residual = fit_quantum_defect(series)
    assert mu == pytest.approx(0.5, abs=1e-8)
    assert residual <= 1e-8


def test_fit_recovers_defect_with_doubly_charged_core():
    series = synthetic_series(0.37, range(4, 9), core_charge=2)
    mu, residual = fit_quantum_defect(series)
    assert mu == pytest.approx(0.37, abs=1e-8)
    assert residual <= 1e-8


@given(mu=st.floats(min_value=0.0, max_value=0.9))
@settings(max_examples=40)
def test_fit_inverts_its_generator(mu):
    series = synthetic_series(mu, range(3, 10))
    fitted, residual = fit_quantum_defect(series)
    assert fitted == pytest.approx(mu, abs=1e-7)
    assert residual <= 1e-6


def test_fit_needs_two_members():
    lone = RydbergSeries(members=((6, 27061.82),), ionization_limit_cm1=98207.0,
                         ell=1, core_charge=2)
    with pytest.raises(SolverError, match="at least two"):
        fit_quantum_defect(lone)


def test_bundled_series_fit_has_documented_large_residual():
    # Two core-penetrating members are only approximately a one-defect series;
    # the residual must be reported large, not hidden.
    series = load_series_file(bundled_series_path(), SERIES_LIMIT_CM1, ell=1,
                              core_charge=2)
    assert series.members == ((6, 27061.82), (7, 63706.28))
    mu, residual = fit_quantum_defect(series)
    assert mu == pytest.approx(3.5067205896659464, rel=1e-6)
    assert 100.0 < residual < 2000.0


# -- cross-section models ----------------------------------------------------------


def test_hydrogenic_threshold_value_in_sanity_window():
    nstar = effective_quantum_number(SEVEN_P_CM1, SERIES_LIMIT_CM1)
    at_threshold = cross_section(nstar, 1, RYDBERG_EV / nstar**2,
                                 model="hydrogenic")
    assert 1.0 <= at_threshold.megabarn <= 100.0
    assert at_threshold.megabarn == pytest.approx(
        SIGMA_KRAMERS_M2 / MEGABARN_M2 * nstar, rel=1e-12)


def test_hydrogenic_at_operating_photon_energy():
    nstar = effective_quantum_number(SEVEN_P_CM1, SERIES_LIMIT_CM1)
    sigma = cross_section(nstar, 1, photon_energy_ev(245.426), model="hydrogenic")
    assert 1.0 <= sigma.megabarn <= 100.0
    assert sigma.megabarn == pytest.approx(8.561074053112144, rel=1e-10)


def test_table_models_near_published_values():
    nstar = effective_quantum_number(SEVEN_P_CM1, SERIES_LIMIT_CM1)
    eph = photon_energy_ev(245.426)
    burgess = cross_section(nstar, 1, eph, model="burgess")
    peach = cross_section(nstar, 1, eph, model="peach")
    assert burgess.megabarn == pytest.approx(5.5, rel=0.2)
    assert peach.megabarn == pytest.approx(7.2, rel=0.2)
    assert burgess.model == "burgess"
    assert peach.model == "peach"


def test_below_threshold_photon_rejected():
    nstar = effective_quantum_number(SEVEN_P_CM1, SERIES_LIMIT_CM1)
    with pytest.raises(SolverError, match="below ionization threshold"):
        cross_section(nstar, 1, 0.5 * RYDBERG_EV / nstar**2, model="hydrogenic")


def test_table_lookup_requires_covering_row():
    with pytest.raises(SolverError, match="no burgess coefficient row"):
        cross_section(3.0, 1, 5.0, model="burgess")
    with pytest.raises(SolverError, match="no peach coefficient row"):
        cross_section(1.78, 0, 5.0, model="peach")


def test_missing_coefficient_table(monkeypatch):
    class MissingFile:
        def joinpath(self, *parts):
            return self

        def read_text(self, encoding="utf-8"):
            raise FileNotFoundError

    import ybion.photoion as photoion
    monkeypatch.setattr(photoion.resources, "files", lambda pkg: MissingFile())
    with pytest.raises(SolverError, match="missing coefficient table"):
        cross_section(1.78, 1, 5.1, model="burgess")


def test_user_model_is_not_computable():
    with pytest.raises(SolverError, match="user"):
        cross_section(1.78, 1, 5.1, model="user")
    with pytest.raises(SolverError, match="unknown cross-section model"):
        cross_section(1.78, 1, 5.1, model="kramers")


def test_cross_section_type_invariants():
    with pytest.raises(SchemeError):
        CrossSection(value_m2=-1e-22, model="user")
    with pytest.raises(SchemeError):
        CrossSection(value_m2=1e-22, model="guess")
    assert CrossSection.from_megabarn(5.5).megabarn == pytest.approx(5.5, rel=1e-15)
    assert CrossSection.from_megabarn(5.5).value_m2 == pytest.approx(5.5e-22, rel=1e-15)


# -- series construction and file ingest -------------------------------------------


def test_series_invariants():
    with pytest.raises(SchemeError, match="must exceed ell"):
        RydbergSeries(members=((1, 100.0),), ionization_limit_cm1=1000.0, ell=1)
    with pytest.raises(SchemeError, match="strictly increasing"):
        RydbergSeries(members=((3, 100.0), (3, 200.0)),
                      ionization_limit_cm1=1000.0, ell=1)
    with pytest.raises(SchemeError, match="above the ionization limit"):
        RydbergSeries(members=((3, 1000.0),), ionization_limit_cm1=1000.0, ell=1)
    with pytest.raises(SchemeError, match="core charge"):
        RydbergSeries(members=((3, 100.0),), ionization_limit_cm1=1000.0,
                      ell=1, core_charge=0)


def test_series_file_round_trip(tmp_path):
    path = tmp_path / "series.tsv"
    path.write_text("# comment\n\n5\t1000.5\n6 2000.25\n", encoding="utf-8")
    series = load_series_file(str(path), ionization_limit_cm1=5000.0, ell=1)
    assert series.members == ((5, 1000.5), (6, 2000.25))
    assert series.core_charge == 1


def test_series_file_errors(tmp_path):
    bad = tmp_path / "bad.tsv"
    bad.write_text("5 1000.5\n6 2000.25 extra\n", encoding="utf-8")
    with pytest.raises(SchemeError, match="line 2"):
        load_series_file(str(bad), 5000.0, 1)
    nan = tmp_path / "nan.tsv"
    nan.write_text("five 1000.5\n", encoding="utf-8")
    with pytest.raises(SchemeError, match="line 1"):
        load_series_file(str(nan), 5000.0, 1)
    empty = tmp_path / "empty.tsv"
    empty.write_text("# nothing here\n", encoding="utf-8")
    with pytest.raises(SchemeError, match="no data rows"):
        load_series_file(str(empty), 5000.0, 1)


def test_bundled_table_files_carry_provenance_headers():
    # Shipped coefficient and series tables must say where their numbers
    # come from; a bare number table is not reviewable.
    from importlib import resources

    for name in ("yb2_p_series.tsv", "xsec_burgess.tsv", "xsec_peach.tsv"):
        text = resources.files("ybion").joinpath("data", name).read_text("utf-8")
        header = [ln for ln in text.splitlines() if ln.startswith("#")]
        assert any("source:" in ln or "NIST" in ln or "pinned" in ln
                   for ln in header), name
