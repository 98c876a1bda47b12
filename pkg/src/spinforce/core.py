"""Point-source monopole-dipole interaction and force-range conversions.

The interaction between a polarized electron spin and a single unpolarized
nucleon, mediated by a light pseudoscalar boson, is a Yukawa-type potential
with a spin projection factor:

    V(r) = (hbar^2 g / 8 pi m) * (1/(lam*r) + 1/r^2) * exp(-r/lam) * (sigma_hat . r_hat)

where ``g`` is the dimensionless product of the scalar nucleon coupling and
the pseudoscalar electron coupling, ``m`` the electron mass, and ``lam`` the
force range (the Compton wavelength of the mediating boson). The same
interaction is equivalently a Zeeman term of the spin in an effective
magnetic field along r_hat:

    B(r) = (hbar g / 4 pi m gamma) * (1/(lam*r) + 1/r^2) * exp(-r/lam) * r_hat

Both are implemented literally; their mutual consistency (V equals the
Zeeman energy (gamma*hbar/2) sigma_hat . B) is covered by the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import CODATA2014, PhysicalConstants

__all__ = [
    "Displacement",
    "potential_monopole_dipole",
    "effective_field_point",
    "lambda_to_alp_mass",
    "alp_mass_to_lambda",
]

_UNIT_NORM_TOL = 1e-9


def _require_positive(name: str, value: float) -> float:
    value = float(value)
    if not (math.isfinite(value) and value > 0.0):
        raise ValueError(f"{name} must be finite and positive, got {value!r}")
    return value


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class Displacement:
    """Displacement vector from the nucleon to the electron spin, in metres.

    ``r`` and ``r_hat`` are derived on construction; the zero vector is
    rejected because every field evaluation requires r > 0.
    """

    r_vector: np.ndarray
    r: float = field(init=False)
    r_hat: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        vec = np.asarray(self.r_vector, dtype=float)
        if vec.shape != (3,):
            raise ValueError(f"r_vector must have shape (3,), got {vec.shape}")
        if not np.all(np.isfinite(vec)):
            raise ValueError("r_vector must be finite")
        norm = float(np.linalg.norm(vec))
        if norm <= 0.0:
            raise ValueError("displacement must be non-zero for field evaluation")
        object.__setattr__(self, "r_vector", vec)
        object.__setattr__(self, "r", norm)
        object.__setattr__(self, "r_hat", vec / norm)


def _as_displacement(r: Displacement | np.ndarray) -> Displacement:
    if isinstance(r, Displacement):
        return r
    return Displacement(np.asarray(r, dtype=float))


def _unit_vector(name: str, v: np.ndarray) -> np.ndarray:
    vec = np.asarray(v, dtype=float)
    if vec.shape != (3,):
        raise ValueError(f"{name} must have shape (3,), got {vec.shape}")
    norm = float(np.linalg.norm(vec))
    if abs(norm - 1.0) > _UNIT_NORM_TOL:
        raise ValueError(f"{name} must be a unit vector, |{name}| = {norm!r}")
    return vec


def _yukawa_radial(r: float, lam: float) -> float:
    """(1/(lam*r) + 1/r^2) * exp(-r/lam), the shared radial profile."""
    return (1.0 / (lam * r) + 1.0 / r**2) * math.exp(-r / lam)


def potential_monopole_dipole(
    r: Displacement | np.ndarray,
    lam: float,
    g: float,
    sigma_hat: np.ndarray,
    constants: PhysicalConstants = CODATA2014,
) -> float:
    """Monopole-dipole potential energy in joules.

    Antisymmetric under sigma_hat -> -sigma_hat and exactly linear in the
    coupling product ``g``.
    """
    disp = _as_displacement(r)
    lam = _require_positive("lam", lam)
    g = _require_finite("g", g)
    sig = _unit_vector("sigma_hat", sigma_hat)
    prefactor = constants.hbar**2 * g / (8.0 * math.pi * constants.electron_mass)
    return prefactor * _yukawa_radial(disp.r, lam) * float(np.dot(sig, disp.r_hat))


def effective_field_point(
    r: Displacement | np.ndarray,
    lam: float,
    g: float,
    constants: PhysicalConstants = CODATA2014,
) -> np.ndarray:
    """Effective magnetic field (tesla, 3-vector) of a single nucleon.

    Points along r_hat for g > 0, with the same Yukawa-type radial falloff
    as the potential.
    """
    disp = _as_displacement(r)
    lam = _require_positive("lam", lam)
    g = _require_finite("g", g)
    prefactor = constants.hbar * g / (
        4.0 * math.pi * constants.electron_mass * constants.gyromagnetic_ratio
    )
    return prefactor * _yukawa_radial(disp.r, lam) * disp.r_hat


def lambda_to_alp_mass(lam: float, constants: PhysicalConstants = CODATA2014) -> float:
    """Boson mass in eV for a given force range in metres (m = hbar c / lam)."""
    lam = _require_positive("lam", lam)
    return constants.hbar_c / lam / constants.ev_to_joule


def alp_mass_to_lambda(mass_ev: float, constants: PhysicalConstants = CODATA2014) -> float:
    """Force range in metres for a given boson mass in eV; inverse of
    :func:`lambda_to_alp_mass`."""
    mass_ev = _require_positive("mass_ev", mass_ev)
    return constants.hbar_c / (mass_ev * constants.ev_to_joule)
