"""Monte Carlo: chopped ionization sequences and synthetic verification.

The ionizing beam is chopped against cooling at chop_rate_hz; within each
cycle of period T = 1/chop_rate the beam is ON for duty*T, then OFF.
Ionization is a homogeneous Poisson process of rate R gated by the ON
windows. Internal-state transients at window edges are neglected: the
scheme's internal rates (>= 1e6 1/s) dwarf a 50 Hz chop, so the excited
population is quasi-static over a window. Each trial draws an exposure
time ~ Exp(R) and maps it through the window structure to a wall-clock
event time; the mapping and its inverse are exposed (exposure_to_wall,
wall_to_exposure) so distribution tests can undo the gating.

Each trial starts at a uniformly random phase of the chop cycle. A
phase-locked start would make the wall-clock mean depend on the lock
point; averaging over the phase gives the stationary mean 1/(R*duty).

Reproducibility: per-trial generators are numpy default_rng (PCG64)
seeded as SeedSequence([rng_seed, trial_index]), so results are identical
however trials are chunked across workers. rng_description() reports the
algorithm and numpy version for run manifests.

The dark-state failure channel seen at high ionizing power is not
modeled; failure_prob is a constant per-window abort knob (default 0)
standing in for any such loss process.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .crystal import (
    ChargePair,
    TrapAxis,
    displacement_ratio,
    infer_charge,
    infer_eta,
    normal_mode_frequencies,
)
from .errors import SchemeError, SolverError

__all__ = [
    "SequenceConfig",
    "IonizationRun",
    "SequenceSummary",
    "VerificationNoise",
    "VerificationRecord",
    "ChargeInference",
    "REPORTED_NOISE",
    "simulate_ionization_times",
    "summarize_times",
    "exposure_to_wall",
    "wall_to_exposure",
    "synthesize_verification",
    "infer_from_verification",
    "runs_to_text",
    "save_runs",
    "rng_description",
]


@dataclass(frozen=True)
class SequenceConfig:
    """One chopped-sequence experiment configuration.

    ionization_duty is the ON fraction of each chop cycle; 1.0 means the
    beam is never chopped (the duty = 1 limit is part of the contract, so
    the range is 0 < duty <= 1). failure_prob is the per-window abort
    probability standing in for unmodeled loss channels; default 0.
    """

    rate_per_s: float
    max_time_s: float
    rng_seed: int
    chop_rate_hz: float = 50.0
    ionization_duty: float = 0.5
    failure_prob: float = 0.0

    def __post_init__(self):
        if self.rate_per_s < 0:
            raise SchemeError("ionization rate must be >= 0")
        if not 0.0 < self.ionization_duty <= 1.0:
            raise SchemeError("ionization duty must lie in (0, 1]")
        if self.chop_rate_hz <= 0:
            raise SchemeError("chop rate must be positive")
        if self.max_time_s <= 0:
            raise SchemeError("max time must be positive")
        if not 0.0 <= self.failure_prob <= 1.0:
            raise SchemeError("failure probability must lie in [0, 1]")

    @property
    def period_s(self) -> float:
        return 1.0 / self.chop_rate_hz

    @property
    def on_time_s(self) -> float:
        return self.ionization_duty * self.period_s


@dataclass(frozen=True)
class IonizationRun:
    """Outcome of one trial.

    event_time_s is the wall-clock ionization time, or None if the trial
    ran out of max_time (or aborted via the failure knob, then failed is
    True). attempt_windows counts ON windows the trial entered.
    initial_phase_s is the chop-cycle phase at t = 0, needed to map the
    wall clock back to the exposure coordinate.
    """

    trial: int
    seed: int
    initial_phase_s: float
    attempt_windows: int
    event_time_s: float | None = None
    failed: bool = False

    def __post_init__(self):
        if self.event_time_s is not None and self.event_time_s < 0:
            raise SchemeError("event time must be >= 0")
        if self.attempt_windows < 0:
            raise SchemeError("attempt window count must be >= 0")


@dataclass(frozen=True)
class SequenceSummary:
    """Estimators over a batch of runs.

    Time statistics cover successful events only and are None when no
    trial ionized; ci95_s needs at least two events (normal approximation
    on the mean).
    """

    n_runs: int
    n_events: int
    success_fraction: float
    mean_s: float | None
    median_s: float | None
    ci95_s: tuple[float, float] | None


@dataclass(frozen=True)
class VerificationNoise:
    """Relative Gaussian sigmas applied to synthetic measurements."""

    ratio_rel: float
    freq_rel: float

    def __post_init__(self):
        if self.ratio_rel < 0 or self.freq_rel < 0:
            raise SchemeError("noise sigmas must be >= 0")


# Measurement scale of the published verification: about 2% on the
# displacement ratio (1.74 +- 0.04) and half a percent on frequencies.
REPORTED_NOISE = VerificationNoise(ratio_rel=0.02, freq_rel=0.005)


@dataclass(frozen=True)
class VerificationRecord:
    """Synthetic post-ionization measurement of the two-ion crystal."""

    displacement_ratio_measured: float
    nu1_measured_hz: float
    nu_com_measured_hz: float
    nu_bre_measured_hz: float
    ratio_rel_sigma: float
    freq_rel_sigma: float

    def __post_init__(self):
        for name in (
            "displacement_ratio_measured",
            "nu1_measured_hz",
            "nu_com_measured_hz",
            "nu_bre_measured_hz",
        ):
            if getattr(self, name) <= 0:
                raise SchemeError(f"{name} must be positive")


@dataclass(frozen=True)
class ChargeInference:
    """Charge estimate recovered from one VerificationRecord."""

    eta_com: float
    eta_bre: float
    eta_mean: float
    q2: float


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


def rng_description() -> str:
    """Algorithm pin for run manifests."""
    return (
        f"numpy default_rng (PCG64), numpy {np.__version__}, "
        "per-trial stream SeedSequence([rng_seed, trial_index])"
    )


def exposure_to_wall(
    exposure_s: float, phase_s: float, chop_rate_hz: float, duty: float
) -> tuple[float, int]:
    """Map accumulated ON-time to wall-clock time from a given start phase.

    Returns (wall_time_s, on_windows_touched). phase_s is the position in
    the chop cycle at wall time zero, in [0, T). The ON window occupies
    the first duty*T of each cycle.
    """
    period = 1.0 / chop_rate_hz
    t_on = duty * period
    if not 0.0 <= phase_s < period:
        raise SolverError("phase must lie in [0, period)")
    if exposure_s < 0:
        raise SolverError("exposure must be >= 0")
    if exposure_s == 0:
        return 0.0, 0
    first_avail = max(t_on - phase_s, 0.0)
    if 0.0 < exposure_s <= first_avail:
        return exposure_s, 1
    remaining = exposure_s - first_avail
    full = int(remaining // t_on)
    rem = remaining - full * t_on
    if rem == 0.0:
        full -= 1
        rem = t_on
    chop_clock = (full + 1) * period + rem
    windows = (1 if first_avail > 0 else 0) + full + 1
    return chop_clock - phase_s, windows


def wall_to_exposure(
    wall_s: float, phase_s: float, chop_rate_hz: float, duty: float
) -> float:
    """Accumulated ON-time between wall time 0 and wall_s (inverse map)."""
    period = 1.0 / chop_rate_hz
    t_on = duty * period
    if not 0.0 <= phase_s < period:
        raise SolverError("phase must lie in [0, period)")
    if wall_s < 0:
        raise SolverError("wall time must be >= 0")
    start = phase_s
    end = phase_s + wall_s

    def on_time_up_to(c: float) -> float:
        cycles = math.floor(c / period)
        frac = c - cycles * period
        return cycles * t_on + min(frac, t_on)

    return on_time_up_to(end) - on_time_up_to(start)


def _windows_started(phase_s: float, horizon_s: float, period: float, t_on: float) -> int:
    """ON windows entered before the horizon (pure window-start count)."""
    inside_first = 1 if phase_s < t_on else 0
    later = int((phase_s + horizon_s) // period)
    return inside_first + later


def _run_with_failures(
    config: SequenceConfig, trial: int, rng: np.random.Generator,
    exposure: float, phase: float,
) -> IonizationRun:
    """Window-by-window walk, drawing one abort uniform per ON window."""
    period = config.period_s
    t_on = config.on_time_s
    horizon = phase + config.max_time_s
    remaining = exposure
    windows = 0
    n = 0 if phase < t_on else 1
    while True:
        start_c = n * period
        if max(start_c, phase) >= horizon:
            return IonizationRun(
                trial=trial, seed=config.rng_seed, initial_phase_s=phase,
                attempt_windows=windows,
            )
        windows += 1
        if rng.uniform() < config.failure_prob:
            return IonizationRun(
                trial=trial, seed=config.rng_seed, initial_phase_s=phase,
                attempt_windows=windows, failed=True,
            )
        avail = t_on - max(0.0, phase - start_c) if n * period <= phase else t_on
        if remaining <= avail:
            event_c = max(start_c, phase) + remaining
            wall = event_c - phase
            if wall <= config.max_time_s:
                return IonizationRun(
                    trial=trial, seed=config.rng_seed, initial_phase_s=phase,
                    attempt_windows=windows, event_time_s=wall,
                )
            return IonizationRun(
                trial=trial, seed=config.rng_seed, initial_phase_s=phase,
                attempt_windows=windows,
            )
        remaining -= avail
        n += 1


def simulate_ionization_times(
    config: SequenceConfig, trials: int
) -> list[IonizationRun]:
    """Simulate trials of the chopped sequence; deterministic given config.

    Per trial: draw the exposure time ~ Exp(rate), draw a uniform initial
    chop phase, map exposure to wall clock through the ON windows, and
    record an event only if it lands before max_time_s.
    """
    if trials < 1:
        raise SchemeError("need at least one trial")
    runs: list[IonizationRun] = []
    period = config.period_s
    t_on = config.on_time_s
    for trial in range(trials):
        rng = _trial_rng(config.rng_seed, trial)
        draw = rng.standard_exponential()
        exposure = draw / config.rate_per_s if config.rate_per_s > 0 else math.inf
        phase = rng.uniform(0.0, period)
        if config.failure_prob > 0.0:
            runs.append(_run_with_failures(config, trial, rng, exposure, phase))
            continue
        max_exposure = wall_to_exposure(
            config.max_time_s, phase, config.chop_rate_hz, config.ionization_duty
        )
        if exposure <= max_exposure:
            wall, windows = exposure_to_wall(
                exposure, phase, config.chop_rate_hz, config.ionization_duty
            )
            runs.append(
                IonizationRun(
                    trial=trial, seed=config.rng_seed, initial_phase_s=phase,
                    attempt_windows=windows, event_time_s=wall,
                )
            )
        else:
            runs.append(
                IonizationRun(
                    trial=trial, seed=config.rng_seed, initial_phase_s=phase,
                    attempt_windows=_windows_started(
                        phase, config.max_time_s, period, t_on
                    ),
                )
            )
    return runs


def summarize_times(runs: list[IonizationRun]) -> SequenceSummary:
    """Event-time estimators over a batch; None statistics when eventless."""
    if not runs:
        raise SchemeError("no runs to summarize")
    times = np.array(
        [r.event_time_s for r in runs if r.event_time_s is not None]
    )
    n_events = len(times)
    if n_events == 0:
        return SequenceSummary(
            n_runs=len(runs), n_events=0, success_fraction=0.0,
            mean_s=None, median_s=None, ci95_s=None,
        )
    mean = float(times.mean())
    ci: tuple[float, float] | None = None
    if n_events >= 2:
        half = 1.96 * float(times.std(ddof=1)) / math.sqrt(n_events)
        ci = (mean - half, mean + half)
    return SequenceSummary(
        n_runs=len(runs),
        n_events=n_events,
        success_fraction=n_events / len(runs),
        mean_s=mean,
        median_s=float(np.median(times)),
        ci95_s=ci,
    )


def synthesize_verification(
    trap: TrapAxis,
    charges: ChargePair,
    noise: VerificationNoise,
    seed: int,
) -> VerificationRecord:
    """Exact crystal observables perturbed by relative Gaussian noise.

    Draw order is fixed (ratio, nu1, nu_com, nu_bre) so records are
    reproducible for a given seed. Zero noise returns exact values.
    """
    ratio_true = displacement_ratio(trap.eta, charges.q2)
    nu_com_true, nu_bre_true = normal_mode_frequencies(trap)
    rng = np.random.default_rng(seed)
    draws = rng.normal(size=4)
    ratio = ratio_true * (1.0 + noise.ratio_rel * draws[0])
    nu1 = trap.nu1_hz * (1.0 + noise.freq_rel * draws[1])
    nu_com = nu_com_true * (1.0 + noise.freq_rel * draws[2])
    nu_bre = nu_bre_true * (1.0 + noise.freq_rel * draws[3])
    return VerificationRecord(
        displacement_ratio_measured=float(ratio),
        nu1_measured_hz=float(nu1),
        nu_com_measured_hz=float(nu_com),
        nu_bre_measured_hz=float(nu_bre),
        ratio_rel_sigma=noise.ratio_rel,
        freq_rel_sigma=noise.freq_rel,
    )


def infer_from_verification(record: VerificationRecord) -> ChargeInference:
    """Published verification recipe: eta from each mode, averaged, then
    charge from the displacement ratio at that eta."""
    eta_com = infer_eta(record.nu_com_measured_hz, record.nu1_measured_hz, "com")
    eta_bre = infer_eta(record.nu_bre_measured_hz, record.nu1_measured_hz, "bre")
    eta_mean = 0.5 * (eta_com + eta_bre)
    q2 = infer_charge(record.displacement_ratio_measured, eta_mean)
    return ChargeInference(
        eta_com=eta_com, eta_bre=eta_bre, eta_mean=eta_mean, q2=q2
    )


def runs_to_text(runs: list[IonizationRun]) -> str:
    """Tabular export: one row per trial (index, event time or NA, windows)."""
    buf = io.StringIO()
    buf.write("trial\tevent_time_s\tattempt_windows\n")
    for r in runs:
        t = "NA" if r.event_time_s is None else repr(r.event_time_s)
        buf.write(f"{r.trial}\t{t}\t{r.attempt_windows}\n")
    return buf.getvalue()


def save_runs(runs: list[IonizationRun], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(runs_to_text(runs))
