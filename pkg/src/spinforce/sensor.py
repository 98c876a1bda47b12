"""Synchronized measurement protocol on the vibrating source mass.

The mass vibrates along the symmetry axis, d(t) = d0 + A*(1 + cos(w_m t)),
so the effective field at the spin is modulated at the vibration frequency.
An echo sequence whose pulses coincide with the equilibrium crossings
(t = tau/2 + n*tau with tau = pi/w_m the half period) then accumulates

    phi = int_{tau/2}^{3tau/2} gamma B_eff(t) cos(theta) dt
        - int_{3tau/2}^{5tau/2} gamma B_eff(t) cos(theta) dt

where theta is the angle between the field axis and the NV axis. The first
window is the near half period, so phi >= 0 for positive coupling. A static
field (A = 0) cancels exactly. CPMG with K pi pulses accumulates K/2 times
the single-period echo phase.

Readout maps the phase onto the ground-state population through the final
pulse phase phi_mw, P0 = 1/2 + 1/2 cos(phi_mw + phi), and the simulated
photon counting draws Poisson shots around the corresponding mean intensity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .constants import CODATA2014, PhysicalConstants
from .geometry import ConvergenceError, SourceMass, effective_field_mass

__all__ = [
    "NV_AXIS_ANGLE",
    "VibrationProfile",
    "PulseSequence",
    "ReadoutModel",
    "SimulatedReadout",
    "distance_at",
    "phase_spin_echo",
    "phase_cpmg",
    "phase_ramsey_static",
    "population_ground",
    "simulate_readout",
]

#: Angle between the source symmetry axis and the NV axis for a [100]-cut
#: diamond, arccos(1/sqrt(3)).
NV_AXIS_ANGLE = math.acos(1.0 / math.sqrt(3.0))


@dataclass(frozen=True)
class VibrationProfile:
    """Axial vibration of the source: minimum distance d0, amplitude A and
    angular frequency omega_m, all SI."""

    d0: float
    d0_uncertainty: float
    amplitude: float
    amplitude_uncertainty: float
    omega_m: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.d0) and self.d0 > 0.0):
            raise ValueError(f"d0 must be positive, got {self.d0!r}")
        if not (math.isfinite(self.d0_uncertainty) and 0.0 <= self.d0_uncertainty < self.d0):
            raise ValueError("d0_uncertainty must satisfy 0 <= dd0 < d0")
        if not (math.isfinite(self.amplitude) and self.amplitude >= 0.0):
            raise ValueError(f"amplitude must be non-negative, got {self.amplitude!r}")
        if not (math.isfinite(self.amplitude_uncertainty) and self.amplitude_uncertainty >= 0.0):
            raise ValueError("amplitude_uncertainty must be non-negative")
        if not (math.isfinite(self.omega_m) and self.omega_m > 0.0):
            raise ValueError(f"omega_m must be positive, got {self.omega_m!r}")

    @property
    def half_period(self) -> float:
        """Free-evolution window tau = pi / omega_m, seconds."""
        return math.pi / self.omega_m


@dataclass(frozen=True)
class PulseSequence:
    """Microwave sequence synchronized to the vibration.

    ``kind`` is one of "ramsey", "spin_echo", "cpmg"; ``n_pi_pulses`` is the
    pi-pulse count for CPMG and None otherwise. ``theta`` is the angle
    between the effective field and the NV axis.
    """

    kind: str
    n_pi_pulses: int | None = None
    theta: float = NV_AXIS_ANGLE

    def __post_init__(self) -> None:
        if self.kind not in ("ramsey", "spin_echo", "cpmg"):
            raise ValueError(f"unknown sequence kind {self.kind!r}")
        if self.kind == "cpmg":
            if not isinstance(self.n_pi_pulses, int) or self.n_pi_pulses < 1:
                raise ValueError("cpmg requires an integer pi-pulse count >= 1")
        elif self.n_pi_pulses is not None:
            raise ValueError(f"n_pi_pulses only applies to cpmg, got kind {self.kind!r}")
        if not (math.isfinite(self.theta) and 0.0 <= self.theta <= math.pi / 2.0):
            raise ValueError(f"theta must lie in [0, pi/2], got {self.theta!r}")

    @classmethod
    def ramsey(cls, theta: float = NV_AXIS_ANGLE) -> "PulseSequence":
        return cls(kind="ramsey", theta=theta)

    @classmethod
    def spin_echo(cls, theta: float = NV_AXIS_ANGLE) -> "PulseSequence":
        return cls(kind="spin_echo", theta=theta)

    @classmethod
    def cpmg(cls, n_pi_pulses: int, theta: float = NV_AXIS_ANGLE) -> "PulseSequence":
        return cls(kind="cpmg", n_pi_pulses=n_pi_pulses, theta=theta)


def distance_at(t, vib: VibrationProfile):
    """Spin-to-surface distance d(t) = d0 + A*(1 + cos(omega_m t)), metres.

    t = 0 is the far turning point d0 + 2A; broadcasts over array t.
    """
    return vib.d0 + vib.amplitude * (1.0 + np.cos(vib.omega_m * np.asarray(t, dtype=float)))


def _echo_period_phase(lam: float, g: float, source: SourceMass, vib: VibrationProfile,
                       theta: float, rel_tol: float,
                       constants: PhysicalConstants) -> float:
    """Accumulated phase of one synchronized echo period.

    The two half-period windows are folded into a single integral of
    gamma*cos(theta)*[B(t) - B(t + tau)] over [tau/2, 3*tau/2], which is
    algebraically identical and makes the static-field cancellation exact
    in floating point.
    """
    tau = vib.half_period
    gamma_cos = constants.gyromagnetic_ratio * math.cos(theta)

    def integrand(t: float) -> float:
        b_near = effective_field_mass(lam, source, distance_at(t, vib), g, constants=constants)
        b_far = effective_field_mass(lam, source, distance_at(t + tau, vib), g, constants=constants)
        return gamma_cos * (b_near - b_far)

    phi, err = integrate.quad(integrand, 0.5 * tau, 1.5 * tau,
                              epsabs=0.0, epsrel=rel_tol, limit=200)
    if err > 10.0 * rel_tol * abs(phi) + 1e-320:
        raise ConvergenceError(
            f"phase quadrature did not converge to rel_tol={rel_tol:g}",
            best_estimate=phi, estimated_error=err,
        )
    return phi


def phase_spin_echo(lam: float, g: float, source: SourceMass, vib: VibrationProfile,
                    seq: PulseSequence, rel_tol: float = 1e-10,
                    constants: PhysicalConstants = CODATA2014) -> float:
    """Echo phase (radians) for force range ``lam`` and coupling ``g``.

    Exactly linear in g; zero for a static mass (A = 0) because the two
    windows cancel.
    """
    if seq.kind != "spin_echo":
        raise ValueError(f"phase_spin_echo requires a spin_echo sequence, got {seq.kind!r}")
    if not (math.isfinite(lam) and lam > 0.0):
        raise ValueError(f"lam must be positive, got {lam!r}")
    return _echo_period_phase(lam, g, source, vib, seq.theta, rel_tol, constants)


def phase_cpmg(n_pi_pulses: int, lam: float, g: float, source: SourceMass,
               vib: VibrationProfile, seq: PulseSequence, rel_tol: float = 1e-10,
               constants: PhysicalConstants = CODATA2014) -> float:
    """CPMG phase (radians): K/2 times the per-period echo bracket.

    The pi pulses sit at consecutive equilibrium crossings, one per half
    period, so K pulses span K/2 vibration periods.
    """
    if seq.kind != "cpmg":
        raise ValueError(f"phase_cpmg requires a cpmg sequence, got {seq.kind!r}")
    if seq.n_pi_pulses != n_pi_pulses:
        raise ValueError(
            f"pulse count mismatch: argument {n_pi_pulses} vs sequence {seq.n_pi_pulses}")
    if not (math.isfinite(lam) and lam > 0.0):
        raise ValueError(f"lam must be positive, got {lam!r}")
    period_phase = _echo_period_phase(lam, g, source, vib, seq.theta, rel_tol, constants)
    return 0.5 * n_pi_pulses * period_phase


def phase_ramsey_static(lam: float, g: float, source: SourceMass, distance: float,
                        tau_free: float, theta: float = NV_AXIS_ANGLE,
                        constants: PhysicalConstants = CODATA2014) -> float:
    """Free-precession phase gamma*B_eff*cos(theta)*tau_free for a static
    mass at fixed distance.

    Illustrative only: a Ramsey sequence is limited by dephasing and this
    phase is not part of the exclusion-limit pipeline.
    """
    b = effective_field_mass(lam, source, distance, g, constants=constants)
    return constants.gyromagnetic_ratio * b * math.cos(theta) * tau_free


def population_ground(phi, phi_mw):
    """Ground-state population after the closing pulse,
    P0 = 1/2 + 1/2*cos(phi_mw + phi). Broadcasts over array inputs."""
    return 0.5 + 0.5 * np.cos(np.asarray(phi_mw, dtype=float) + np.asarray(phi, dtype=float))


@dataclass(frozen=True)
class ReadoutModel:
    """Photon-counting model for the optical readout.

    Mean counts per shot follow I0 + A_PL*cos(phi_mw + phi) with
    I0 = baseline + photons_per_shot and A_PL = contrast * photons_per_shot.
    Sampling is Poisson, fully determined by ``seed``.
    """

    photons_per_shot: float = 0.02
    contrast: float = 0.30
    baseline: float = 0.0
    shots: int = 650_000
    seed: int = 0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.photons_per_shot) and self.photons_per_shot >= 0.0):
            raise ValueError("photons_per_shot must be non-negative")
        # contrast 0 is admitted (flat readout) even though any useful
        # measurement needs contrast > 0; see the low-contrast fit flag.
        if not (math.isfinite(self.contrast) and 0.0 <= self.contrast <= 1.0):
            raise ValueError(f"contrast must lie in [0, 1], got {self.contrast!r}")
        if not (math.isfinite(self.baseline) and self.baseline >= 0.0):
            raise ValueError("baseline must be non-negative")
        if not (isinstance(self.shots, int) and self.shots >= 1):
            raise ValueError("shots must be a positive integer")
        if not (isinstance(self.seed, int) and self.seed >= 0):
            raise ValueError("seed must be a non-negative integer")


@dataclass(frozen=True)
class SimulatedReadout:
    """Per-point readout statistics over a sweep of the closing-pulse phase."""

    phi_mw: np.ndarray
    mean_counts: np.ndarray
    std_error: np.ndarray

    def __post_init__(self) -> None:
        phi_mw = np.asarray(self.phi_mw, dtype=float)
        mean_counts = np.asarray(self.mean_counts, dtype=float)
        std_error = np.asarray(self.std_error, dtype=float)
        if not (phi_mw.ndim == 1 and phi_mw.shape == mean_counts.shape == std_error.shape):
            raise ValueError("phi_mw, mean_counts and std_error must be equal-length 1-D arrays")
        if phi_mw.size == 0:
            raise ValueError("readout must contain at least one point")
        if not np.all(np.isfinite(phi_mw)) or not np.all(np.isfinite(mean_counts)) \
                or not np.all(np.isfinite(std_error)):
            raise ValueError("readout data must be finite")
        if np.any(np.diff(phi_mw) <= 0.0):
            raise ValueError("phi_mw values must be strictly increasing")
        if np.any(std_error <= 0.0):
            raise ValueError("std_error must be positive")
        object.__setattr__(self, "phi_mw", phi_mw)
        object.__setattr__(self, "mean_counts", mean_counts)
        object.__setattr__(self, "std_error", std_error)

    def __len__(self) -> int:
        return self.phi_mw.size


def simulate_readout(phi_true: float, phi_mw_grid, model: ReadoutModel) -> SimulatedReadout:
    """Draw a synthetic readout curve around the cosine model.

    Per grid point, ``model.shots`` Poisson samples are drawn with mean
    I0 + A_PL*cos(phi_mw + phi_true); the empirical mean and standard error
    are returned. Bit-identical for identical (seed, inputs).
    """
    grid = np.asarray(phi_mw_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("phi_mw_grid must be a non-empty 1-D array")
    if np.any(np.diff(grid) <= 0.0):
        raise ValueError("phi_mw_grid must be strictly increasing")
    if not math.isfinite(phi_true):
        raise ValueError(f"phi_true must be finite, got {phi_true!r}")

    i0 = model.baseline + model.photons_per_shot
    a_pl = model.contrast * model.photons_per_shot
    means = i0 + a_pl * np.cos(grid + phi_true)
    rng = np.random.default_rng(model.seed)
    shots = model.shots
    mean_counts = np.empty_like(means)
    std_error = np.empty_like(means)
    for i, mu in enumerate(means):
        samples = rng.poisson(mu, size=shots)
        mean_counts[i] = samples.mean()
        if shots > 1:
            se = samples.std(ddof=1) / math.sqrt(shots)
            # 1/shots floor: counting resolution, keeps weights finite when a
            # tiny mean yields identical samples.
            std_error[i] = max(se, 1.0 / shots)
        else:
            std_error[i] = max(math.sqrt(mean_counts[i]), 1.0)
    return SimulatedReadout(phi_mw=grid, mean_counts=mean_counts, std_error=std_error)
