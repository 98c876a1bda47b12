"""Synchronized echo phase on the vibrating source.

The half-ball sits on a tuning fork, d(t) = d0 + A*(1 + cos(w_m t)). An
echo whose pi pulse lands on the equilibrium crossing subtracts the far
half period from the near one, so the static part of the field cancels and
only the vibration-induced difference accumulates. CPMG repeats the
pattern: K pi pulses give K/2 times the single-period phase.
"""

import numpy as np

from spinforce import (PulseSequence, SourceMass, VibrationProfile, distance_at,
                       phase_cpmg, phase_spin_echo, sensitivity_h)

src = SourceMass(radius=250e-6, radius_uncertainty=2.5e-6, nucleon_density=1.33e30)
vib = VibrationProfile(d0=0.5e-6, d0_uncertainty=0.1e-6, amplitude=41.1e-9,
                       amplitude_uncertainty=0.1e-9, omega_m=1.18e6)
echo = PulseSequence.spin_echo()

tau = vib.half_period
print(f"half period tau = {tau * 1e6:.3f} us")
ts = np.linspace(0.0, 2.0 * tau, 5)
print("source-spin distance over one vibration period:")
for t in ts:
    print(f"  t = {t / tau:4.2f} tau: d = {distance_at(t, vib) * 1e9:8.2f} nm")

print()
g = 1e-12
phi = phase_spin_echo(20e-6, g, src, vib, echo)
print(f"echo phase at lambda = 20 um, g = {g:g}: phi = {phi:.6e} rad")
print(f"sensitivity h = phi/g = {phi / g:.6e} rad (exactly linear in g)")

h = sensitivity_h(20e-6, src.radius, vib.d0, vib.amplitude, echo.theta,
                  src.nucleon_density, echo, vib.omega_m)
print(f"independent quadrature route:       {h:.6e} rad")

print()
print("a static source (A = 0) leaves no echo phase at all:")
static = VibrationProfile(d0=0.5e-6, d0_uncertainty=0.0, amplitude=0.0,
                          amplitude_uncertainty=0.0, omega_m=1.18e6)
print(f"  phi = {phase_spin_echo(20e-6, g, src, static, echo):.1e} rad")

print()
print("CPMG multiplies the per-period phase by K/2:")
for k in (2, 16, 128, 1024):
    phi_k = phase_cpmg(k, 20e-6, g, src, vib, PulseSequence.cpmg(k))
    print(f"  K = {k:5d}: phi = {phi_k:.4e} rad  (ratio to echo {phi_k / phi:7.1f})")

print()
print("sensitivity versus force range:")
for lam_um in (0.1, 1.0, 5.0, 20.0, 50.0):
    h = sensitivity_h(lam_um * 1e-6, src.radius, vib.d0, vib.amplitude,
                      echo.theta, src.nucleon_density, echo, vib.omega_m)
    print(f"  lambda = {lam_um:5.1f} um: h = {h:.4e} rad")
