"""Finite source: the half-ball shape factor.

Integrating the point interaction over a half-ball of radius R whose flat
face points away from the spin gives B_eff = (hbar g rho / 2 m gamma) *
f(lambda, R, d). The closed form for f is checked here against direct
numerical quadrature, and its saturation with lambda and decay with
distance are printed.
"""

import numpy as np

from spinforce import (SourceMass, effective_field_mass, shape_factor_closed_form,
                       shape_factor_quadrature)

R = 250e-6
d = 0.5e-6

print("closed form vs quadrature (relative difference):")
for lam_um in (0.1, 1.0, 20.0, 1000.0):
    lam = lam_um * 1e-6
    cf = shape_factor_closed_form(lam, R, d).value
    quad = shape_factor_quadrature(lam, R, d, rel_tol=1e-10)
    rel = abs(cf - quad.value) / abs(quad.value)
    print(f"  lambda = {lam_um:7.1f} um: f = {cf:.9e} m, rel diff {rel:.1e}")

print()
print("f saturates once lambda exceeds the geometry scales:")
lams = np.geomspace(0.1e-6, 1e-3, 9)
f = shape_factor_closed_form(lams, R, d).value
for lam, fi in zip(lams, f):
    print(f"  lambda = {lam * 1e6:9.2f} um: f = {fi:.3e} m")

print()
print("and falls off with the standoff distance d at fixed lambda = 20 um:")
ds = np.array([0.1e-6, 0.5e-6, 2e-6, 10e-6, 50e-6])
f = shape_factor_closed_form(20e-6, R, ds).value
for di, fi in zip(ds, f):
    print(f"  d = {di * 1e6:5.1f} um: f = {fi:.3e} m")

print()
src = SourceMass(radius=R, radius_uncertainty=2.5e-6, nucleon_density=1.33e30,
                 label="fused-silica half-ball")
b = effective_field_mass(20e-6, src, d, g=1e-10)
print(f"effective field of the {src.label} at d = {d * 1e6:.1f} um, "
      f"lambda = 20 um, g = 1e-10:")
print(f"  B_eff = {b:.3e} T")
