"""Phase extraction from readout curves.

The readout intensity is a cosine in the closing-pulse phase,
I = I0 + A_PL*cos(phi_mw + phi). Instead of a nonlinear cosine fit, the
model is reparameterized as I = I0 + a*cos(phi_mw) + b*sin(phi_mw) with
a = A_PL*cos(phi), b = -A_PL*sin(phi), which is exactly linear and needs no
initialization; phi = atan2(-b, a) and A_PL = hypot(a, b) follow, with the
phase uncertainty propagated from the linear-model covariance.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .sensor import SimulatedReadout

__all__ = [
    "CosineFitError",
    "FitResult",
    "PhaseMeasurement",
    "wrap_phase",
    "fit_cosine",
    "difference_phase",
    "phase_upper_bound",
]

log = logging.getLogger(__name__)


class CosineFitError(RuntimeError):
    """Raised when the readout curve cannot constrain the cosine model."""


def wrap_phase(phi: float) -> float:
    """Wrap an angle to the (-pi, pi] convention used package-wide."""
    wrapped = math.remainder(phi, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


@dataclass(frozen=True)
class FitResult:
    """Cosine-model fit: offset, amplitude (reported >= 0), phase wrapped to
    (-pi, pi] with standard deviation, and unweighted residual RMS.

    ``low_contrast`` marks amplitudes consistent with zero, where the phase
    is unconstrained and phi_std reflects the divergence.
    """

    i0: float
    a_pl: float
    phi: float
    phi_std: float
    residual_rms: float
    low_contrast: bool = False


@dataclass(frozen=True)
class PhaseMeasurement:
    """An extracted phase with its standard deviation, radians."""

    phi: float
    phi_std: float
    label: str = ""

    def __post_init__(self) -> None:
        if not math.isfinite(self.phi):
            raise ValueError(f"phi must be finite, got {self.phi!r}")
        if not (math.isfinite(self.phi_std) and self.phi_std >= 0.0):
            raise ValueError(f"phi_std must be non-negative, got {self.phi_std!r}")


def _unpack(readout, counts, std_error):
    if isinstance(readout, SimulatedReadout):
        if counts is not None or std_error is not None:
            raise TypeError("pass either a SimulatedReadout or separate arrays, not both")
        return readout.phi_mw, readout.mean_counts, readout.std_error
    phi_mw = np.asarray(readout, dtype=float)
    if counts is None:
        raise TypeError("counts required when phi_mw is given as an array")
    counts = np.asarray(counts, dtype=float)
    if std_error is not None:
        std_error = np.asarray(std_error, dtype=float)
    return phi_mw, counts, std_error


def fit_cosine(readout, counts=None, std_error=None) -> FitResult:
    """Least-squares fit of I0 + A_PL*cos(phi_mw + phi) to a readout curve.

    Accepts a :class:`SimulatedReadout` or (phi_mw, counts[, std_error])
    arrays. Points are weighted by 1/std_error^2 when errors are given and
    equally otherwise; at least 3 distinct phi_mw values are required.
    """
    phi_mw, counts, std_error = _unpack(readout, counts, std_error)
    if phi_mw.ndim != 1 or phi_mw.shape != counts.shape:
        raise ValueError("phi_mw and counts must be equal-length 1-D arrays")
    if np.unique(phi_mw).size < 3:
        raise CosineFitError("need at least 3 distinct phi_mw points")
    if not (np.all(np.isfinite(phi_mw)) and np.all(np.isfinite(counts))):
        raise ValueError("fit inputs must be finite")

    design = np.column_stack([np.ones_like(phi_mw), np.cos(phi_mw), np.sin(phi_mw)])
    if std_error is not None:
        if std_error.shape != counts.shape or np.any(std_error <= 0.0) \
                or not np.all(np.isfinite(std_error)):
            raise ValueError("std_error must be positive, finite and match counts")
        sqrt_w = 1.0 / std_error
    else:
        sqrt_w = np.ones_like(counts)

    coef, _, rank, _ = np.linalg.lstsq(design * sqrt_w[:, None], counts * sqrt_w, rcond=None)
    if rank < 3:
        raise CosineFitError("degenerate phi_mw design, cosine model not identifiable")

    normal = (design * sqrt_w[:, None]).T @ (design * sqrt_w[:, None])
    cov = np.linalg.inv(normal)
    if std_error is None:
        # Equal weights: scale by the residual variance estimate.
        dof = counts.size - 3
        resid = counts - design @ coef
        cov = cov * (float(resid @ resid) / dof if dof > 0 else 0.0)

    i0, a, b = (float(c) for c in coef)
    a_pl = math.hypot(a, b)
    phi = wrap_phase(math.atan2(-b, a))
    amp2 = a * a + b * b
    if amp2 > 0.0:
        # Delta method through atan2(-b, a).
        d_a = b / amp2
        d_b = -a / amp2
        var_phi = d_a * d_a * cov[1, 1] + d_b * d_b * cov[2, 2] + 2.0 * d_a * d_b * cov[1, 2]
        phi_std = math.sqrt(max(var_phi, 0.0))
        var_amp = (a * a * cov[1, 1] + b * b * cov[2, 2] + 2.0 * a * b * cov[1, 2]) / amp2
        amp_std = math.sqrt(max(var_amp, 0.0))
        low_contrast = a_pl <= 2.0 * amp_std
    else:
        phi_std = math.inf
        low_contrast = True

    resid = counts - design @ coef
    residual_rms = float(np.sqrt(np.mean(resid**2)))
    return FitResult(i0=i0, a_pl=a_pl, phi=phi, phi_std=phi_std,
                     residual_rms=residual_rms, low_contrast=low_contrast)


def difference_phase(with_mass: PhaseMeasurement,
                     without_mass: PhaseMeasurement) -> PhaseMeasurement:
    """Phase attributable to the mass: with-mass minus benchmark, wrapped to
    (-pi, pi], uncertainties combined in quadrature."""
    phi = wrap_phase(with_mass.phi - without_mass.phi)
    std = math.hypot(with_mass.phi_std, without_mass.phi_std)
    label = f"{with_mass.label or 'with'} - {without_mass.label or 'without'}"
    return PhaseMeasurement(phi=phi, phi_std=std, label=label)


def phase_upper_bound(measurement: PhaseMeasurement, k_sigma: float = 2.0) -> float:
    """Upper bound on |phase|: |phi| + k_sigma * phi_std (default 2 sigma).

    With a null central value this reduces to k_sigma * phi_std; a nonzero
    central value extends the convention and is logged.
    """
    if not (math.isfinite(k_sigma) and k_sigma > 0.0):
        raise ValueError(f"k_sigma must be positive, got {k_sigma!r}")
    if measurement.phi != 0.0:
        log.info("nonzero central phase %.3g rad: bound uses |phi| + %g*sigma",
                 measurement.phi, k_sigma)
    return abs(measurement.phi) + k_sigma * measurement.phi_std
