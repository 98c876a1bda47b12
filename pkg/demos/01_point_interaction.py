"""Point-source monopole-dipole interaction.

A spin at displacement r from a nucleon feels a potential that falls off
with a Yukawa factor exp(-r/lambda): lambda is the range of the force and
maps to the mass of the exchanged boson. This script prints the potential,
the equivalent magnetic field along the separation axis, and the
range <-> mass conversion.
"""

import numpy as np

from spinforce import (Displacement, alp_mass_to_lambda, effective_field_point,
                       lambda_to_alp_mass, potential_monopole_dipole)

g = 1e-10          # coupling product g_s^N g_p^e, dimensionless
lam = 20e-6        # force range, metres

print(f"force range lambda = {lam * 1e6:.1f} um "
      f"-> boson mass {lambda_to_alp_mass(lam) * 1e3:.3f} meV")
print(f"inverse check: {alp_mass_to_lambda(lambda_to_alp_mass(lam)) * 1e6:.3f} um")
print()

print(f"{'r (um)':>8} {'V (J)':>13} {'B_eff (T)':>13}")
sigma_hat = np.array([0.0, 0.0, 1.0])  # spin along the separation axis
for r_um in (1.0, 5.0, 20.0, 50.0, 200.0):
    r = Displacement(np.array([0.0, 0.0, r_um * 1e-6]))
    v = potential_monopole_dipole(r, lam, g, sigma_hat)
    b = effective_field_point(r, lam, g)
    print(f"{r_um:8.1f} {v:13.3e} {np.linalg.norm(b):13.3e}")

print()
print("the field is radial: at r along z only B_z survives")
b = effective_field_point(Displacement(np.array([0.0, 0.0, 20e-6])), lam, g)
print(f"B = ({b[0]:.2e}, {b[1]:.2e}, {b[2]:.3e}) T")

print()
print("beyond a few lambda the Yukawa factor wins over every power law:")
for r_um in (20.0, 100.0, 300.0):
    r = Displacement(np.array([0.0, 0.0, r_um * 1e-6]))
    print(f"  |B|({r_um:5.0f} um) = {np.linalg.norm(effective_field_point(r, lam, g)):.3e} T")
