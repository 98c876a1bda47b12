"""Physical constants in SI units.

A single frozen instance, CODATA2014, is shared by every module so that
all derived quantities (fields, phases, exclusion bounds) are mutually
consistent and reproducible.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants, SI.

    ``gyromagnetic_ratio`` is the magnitude of the electron value. Sign
    conventions are absorbed into the phase formulas downstream, which
    only ever use |phase|.
    """

    hbar: float = 1.054571800e-34            # J s
    electron_mass: float = 9.10938356e-31    # kg
    gyromagnetic_ratio: float = 1.760859644e11  # rad s^-1 T^-1
    speed_of_light: float = 299792458.0      # m s^-1
    ev_to_joule: float = 1.6021766208e-19    # J per eV

    def __post_init__(self) -> None:
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{field.name} must be finite and positive, got {value!r}")

    @property
    def hbar_c(self) -> float:
        """hbar * c in J m, used by the force-range / boson-mass conversion."""
        return self.hbar * self.speed_of_light


#: Canonical constants instance (CODATA 2014). Use this everywhere.
CODATA2014 = PhysicalConstants()
