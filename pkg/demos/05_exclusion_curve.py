"""Exclusion limits on the coupling product versus force range.

The bound at each force range is sup(phi) / min(h): the phase bound from
the readout statistics divided by the sensitivity minimized over the
experimental-parameter uncertainty box (radius, standoff, amplitude,
alignment angle). A projected scenario with a denser source, closer
approach and CPMG-1024 shows how far the same method can be pushed.
"""

from spinforce import (default_experiment, default_lambda_grid, exclusion_curve,
                       projected_scenario)
from spinforce.cli import write_curve_csv

current = default_experiment()
projected = projected_scenario()
grid = default_lambda_grid()

print("sweeping 60 force ranges, current configuration ...")
curve = exclusion_curve(grid, current)
lam, bound = curve.bound_near(20e-6)
print(f"  g_s g_p <= {bound:.3e} at lambda = {lam * 1e6:.2f} um")

print("... and the projected configuration")
proj = exclusion_curve(grid, projected)
lam_p, bound_p = proj.bound_near(20e-6)
print(f"  g_s g_p <= {bound_p:.3e} at lambda = {lam_p * 1e6:.2f} um")
print(f"  improvement factor {bound / bound_p:.1e}")

print()
print(f"{'lambda (um)':>12} {'mass (meV)':>11} {'current':>11} {'projected':>11}")
for i in range(0, len(curve), 6):
    print(f"{curve.lambda_m[i] * 1e6:12.3f} {curve.alp_mass_ev[i] * 1e3:11.3f} "
          f"{curve.g_bound[i]:11.3e} {proj.g_bound[i]:11.3e}")

n = write_curve_csv("exclusion_current.csv", curve)
m = write_curve_csv("exclusion_projected.csv", proj)
print()
print(f"wrote {n} points to exclusion_current.csv, {m} to exclusion_projected.csv")
