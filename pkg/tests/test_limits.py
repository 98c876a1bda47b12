"""Exclusion-limit pipeline: nuisance minimization and the coupling bound.

Reference numbers are 40-digit quadrature evaluations of the same integrals
performed independently with mpmath.
"""

import math
from itertools import product

import numpy as np
import pytest

from spinforce.constants import CODATA2014
from spinforce.geometry import ConvergenceError, SourceMass
from spinforce.limits import (DEFAULT_THETA_UNCERTAINTY, ExclusionCurve,
                              ExperimentConfig, NuisanceBox, bound_at_lambda,
                              default_experiment, default_lambda_grid,
                              exclusion_curve, projected_scenario,
                              sensitivity_h)
from spinforce.sensor import NV_AXIS_ANGLE, PulseSequence, VibrationProfile

# Default-grid point nearest 20 um and the bound there (mpmath reference).
LAM_NEAR_20UM = 1.9597033874236104e-5
BOUND_NEAR_20UM = 6.2397230326913635e-15
BOUND_EXACT_20UM = 6.2267763884512027e-15
H_CENTRAL_20UM = 6.4869608158241658e12
H_MIN_CORNER_20UM = 5.7694868524432267e12

ECHO = PulseSequence.spin_echo()


def _central_kwargs(cfg):
    return dict(radius=cfg.source.radius, d0=cfg.vib.d0, amplitude=cfg.vib.amplitude,
                theta=cfg.seq.theta, rho=cfg.source.nucleon_density, seq=cfg.seq,
                omega_m=cfg.vib.omega_m)


def test_sensitivity_central_frozen():
    cfg = default_experiment()
    h = sensitivity_h(20e-6, rel_tol=1e-11, **_central_kwargs(cfg))
    assert isinstance(h, float)
    assert h == pytest.approx(H_CENTRAL_20UM, rel=1e-10)


def test_sensitivity_broadcasts():
    cfg = default_experiment()
    kw = _central_kwargs(cfg)
    radii = np.array([247.5e-6, 250e-6, 252.5e-6])
    kw["radius"] = radii
    h = sensitivity_h(20e-6, **kw)
    assert h.shape == radii.shape
    assert h[1] == pytest.approx(H_CENTRAL_20UM, rel=1e-8)


def test_sensitivity_zero_amplitude_exact():
    cfg = default_experiment()
    kw = _central_kwargs(cfg)
    kw["amplitude"] = 0.0
    assert sensitivity_h(20e-6, **kw) == 0.0


def test_sensitivity_perpendicular_axis():
    cfg = default_experiment()
    kw = _central_kwargs(cfg)
    h0 = sensitivity_h(20e-6, **kw)
    kw["theta"] = math.pi / 2.0
    assert abs(sensitivity_h(20e-6, **kw)) <= 1e-14 * abs(h0)


def test_sensitivity_cpmg_two_matches_echo():
    cfg = default_experiment()
    kw = _central_kwargs(cfg)
    h_echo = sensitivity_h(20e-6, **kw)
    kw["seq"] = PulseSequence.cpmg(2)
    assert sensitivity_h(20e-6, **kw) == h_echo
    kw["seq"] = PulseSequence.cpmg(1024)
    assert sensitivity_h(20e-6, **kw) == pytest.approx(512.0 * h_echo, rel=1e-14)


def test_sensitivity_rejects_ramsey():
    cfg = default_experiment()
    kw = _central_kwargs(cfg)
    kw["seq"] = PulseSequence.ramsey()
    with pytest.raises(ValueError):
        sensitivity_h(20e-6, **kw)


def test_sensitivity_input_validation():
    cfg = default_experiment()
    kw = _central_kwargs(cfg)
    for bad in (dict(theta=2.0), dict(amplitude=-1e-9), dict(d0=0.0), dict(rho=-1.0)):
        with pytest.raises(ValueError):
            sensitivity_h(20e-6, **{**kw, **bad})
    with pytest.raises(ValueError):
        sensitivity_h(-1e-6, **kw)


def test_minimum_sits_at_large_radius_corner():
    """The box minimum of h is at R_hi, d0_hi, A_lo, theta_hi: the radius
    dependence of the window difference is weakly decreasing, unlike the
    shape factor itself."""
    cfg = default_experiment()
    box = cfg.nuisance
    corners = np.array(list(product(box.r_range, box.d0_range, box.a_range,
                                    box.theta_range)))
    h = sensitivity_h(LAM_NEAR_20UM, corners[:, 0], corners[:, 1], corners[:, 2],
                      corners[:, 3], cfg.source.nucleon_density, cfg.seq,
                      cfg.vib.omega_m, rel_tol=1e-11)
    i = int(np.argmin(h))
    assert corners[i, 0] == box.r_range[1]
    assert corners[i, 1] == box.d0_range[1]
    assert corners[i, 2] == box.a_range[0]
    assert corners[i, 3] == box.theta_range[1]
    assert h[i] == pytest.approx(H_MIN_CORNER_20UM, rel=1e-10)


def test_bound_frozen_at_grid_point():
    cfg = default_experiment()
    assert bound_at_lambda(LAM_NEAR_20UM, cfg) == pytest.approx(BOUND_NEAR_20UM, rel=1e-13)
    assert bound_at_lambda(20e-6, cfg) == pytest.approx(BOUND_EXACT_20UM, rel=1e-12)


def test_bound_matches_headline_value():
    cfg = default_experiment()
    lam, bound = exclusion_curve(default_lambda_grid(), cfg).bound_near(20e-6)
    assert lam == pytest.approx(LAM_NEAR_20UM, rel=1e-12)
    assert bound == pytest.approx(6.24e-15, rel=0.02)


def test_bound_scales_with_phase_bound():
    cfg = default_experiment()
    half = ExperimentConfig(source=cfg.source, vib=cfg.vib, seq=cfg.seq,
                            phase_bound=0.018, nuisance=cfg.nuisance)
    assert bound_at_lambda(20e-6, half) == pytest.approx(
        0.5 * bound_at_lambda(20e-6, cfg), rel=1e-12)


def test_bound_requires_positive_phase_bound():
    cfg = default_experiment()
    zero = ExperimentConfig(source=cfg.source, vib=cfg.vib, seq=cfg.seq,
                            phase_bound=0.0, nuisance=cfg.nuisance)
    with pytest.raises(ValueError):
        bound_at_lambda(20e-6, zero)


def _tiny_amplitude_config(amplitude):
    src = SourceMass(radius=250e-6, radius_uncertainty=0.0, nucleon_density=1.33e30)
    vib = VibrationProfile(d0=0.5e-6, d0_uncertainty=0.0, amplitude=amplitude,
                           amplitude_uncertainty=0.0, omega_m=1.18e6)
    box = NuisanceBox.from_central(src, vib, ECHO.theta)
    return ExperimentConfig(source=src, vib=vib, seq=ECHO, phase_bound=0.036,
                            nuisance=box)


def test_noise_floor_returns_inf():
    # bracket/scale ~ 3e-13, below the 1e-12 floor: converges but is noise
    cfg = _tiny_amplitude_config(1e-17)
    assert bound_at_lambda(20e-6, cfg, rel_tol=1e-6) == math.inf


def test_curve_gap_on_unconverged_point():
    # at lam ~ 0.09 m the bracket is pure cancellation noise and the
    # quadrature cannot stabilize: the sweep records a gap, not an abort
    cfg = _tiny_amplitude_config(1e-14)
    curve = exclusion_curve(np.array([20e-6, 0.09]), cfg)
    assert len(curve) == 1
    assert curve.lambda_m[0] == pytest.approx(20e-6)
    assert len(curve.gaps) == 1
    assert curve.gaps[0][0] == pytest.approx(0.09)
    assert "quadrature" in curve.gaps[0][1]


def test_curve_gap_on_noise_floor_point():
    cfg = _tiny_amplitude_config(1e-17)
    curve = exclusion_curve(np.array([20e-6]), cfg, rel_tol=1e-6)
    assert len(curve) == 0
    assert len(curve.gaps) == 1
    assert "no constraint" in curve.gaps[0][1]


def test_curve_workers_deterministic():
    cfg = default_experiment()
    grid = np.geomspace(1e-6, 30e-6, 10)
    serial = exclusion_curve(grid, cfg, workers=1)
    threaded = exclusion_curve(grid, cfg, workers=4)
    np.testing.assert_array_equal(serial.g_bound, threaded.g_bound)
    np.testing.assert_array_equal(serial.lambda_m, threaded.lambda_m)


def test_curve_grid_validation():
    cfg = default_experiment()
    with pytest.raises(ValueError):
        exclusion_curve(np.array([2e-6, 1e-6]), cfg)        # not increasing
    with pytest.raises(ValueError):
        exclusion_curve(np.array([1e-9, 1e-6]), cfg)        # below sweep range
    with pytest.raises(ValueError):
        exclusion_curve(np.array([1e-6, 0.2]), cfg)         # above sweep range
    with pytest.raises(ValueError):
        exclusion_curve(np.array([]), cfg)


def test_default_lambda_grid():
    grid = default_lambda_grid()
    assert grid.size == 60
    assert grid[0] == pytest.approx(0.05e-6, rel=1e-12)
    assert grid[-1] == pytest.approx(50e-6, rel=1e-12)
    assert np.all(np.diff(np.log(grid)) > 0)
    with pytest.raises(ValueError):
        default_lambda_grid(0)


def test_curve_shape():
    cfg = default_experiment()
    curve = exclusion_curve(default_lambda_grid(), cfg)
    assert len(curve) == 60 and not curve.gaps
    assert np.all(curve.g_bound > 0.0)
    # short ranges are far less constrained than ranges comparable to d0, R
    assert curve.g_bound[0] > 1e3 * curve.bound_near(20e-6)[1]
    rows = curve.as_rows()
    assert len(rows) == 60 and len(rows[0]) == 3
    # boson mass column is hbar c / lambda in eV
    lam0, mass0, _ = rows[0]
    assert mass0 == pytest.approx(CODATA2014.hbar_c / lam0 / CODATA2014.ev_to_joule,
                                  rel=1e-12)


def test_exclusion_curve_validation():
    lam = np.array([1e-6, 2e-6])
    good = dict(lambda_m=lam, alp_mass_ev=np.ones(2), g_bound=np.ones(2))
    ExclusionCurve(**good)
    with pytest.raises(ValueError):
        ExclusionCurve(lambda_m=lam[::-1].copy(), alp_mass_ev=np.ones(2),
                       g_bound=np.ones(2))
    with pytest.raises(ValueError):
        ExclusionCurve(lambda_m=lam, alp_mass_ev=np.ones(2),
                       g_bound=np.array([1.0, math.inf]))
    with pytest.raises(ValueError):
        ExclusionCurve(lambda_m=lam, alp_mass_ev=np.ones(3), g_bound=np.ones(2))
    empty = ExclusionCurve(lambda_m=np.array([]), alp_mass_ev=np.array([]),
                           g_bound=np.array([]))
    with pytest.raises(ValueError):
        empty.bound_near(1e-6)


def test_nuisance_box_validation():
    with pytest.raises(ValueError):
        NuisanceBox(r_range=(2e-4, 1e-4), d0_range=(1e-6, 1e-6),
                    a_range=(1e-9, 1e-9), theta_range=(0.9, 1.0))
    with pytest.raises(ValueError):
        NuisanceBox(r_range=(1e-4, 2e-4), d0_range=(0.0, 1e-6),
                    a_range=(1e-9, 1e-9), theta_range=(0.9, 1.0))
    with pytest.raises(ValueError):
        NuisanceBox(r_range=(1e-4, 2e-4), d0_range=(1e-6, 1e-6),
                    a_range=(1e-9, 1e-9), theta_range=(0.9, 2.0))


def test_experiment_config_rejects_off_centre_box():
    cfg = default_experiment()
    shifted = NuisanceBox(r_range=(cfg.source.radius, cfg.source.radius + 5e-6),
                          d0_range=cfg.nuisance.d0_range,
                          a_range=cfg.nuisance.a_range,
                          theta_range=cfg.nuisance.theta_range)
    with pytest.raises(ValueError):
        ExperimentConfig(source=cfg.source, vib=cfg.vib, seq=cfg.seq,
                         phase_bound=cfg.phase_bound, nuisance=shifted)


def test_default_experiment_box():
    cfg = default_experiment()
    assert cfg.label == "current"
    assert cfg.phase_bound == pytest.approx(0.036)
    assert cfg.nuisance.r_range == (247.5e-6, 252.5e-6)
    lo, hi = cfg.nuisance.theta_range
    assert hi - lo == pytest.approx(2 * DEFAULT_THETA_UNCERTAINTY, rel=1e-12)
    assert 0.5 * (lo + hi) == pytest.approx(NV_AXIS_ANGLE, rel=1e-12)


def test_projected_scenario():
    proj = projected_scenario()
    assert proj.label == "projected"
    assert proj.source.nucleon_density == pytest.approx(4.29e30)
    assert proj.seq.kind == "cpmg" and proj.seq.n_pi_pulses == 1024
    assert proj.phase_bound == pytest.approx(0.036 / math.sqrt(17.0), rel=1e-12)
    # collapsed box: every range has zero width
    for lo, hi in proj.nuisance.ranges().values():
        assert lo == hi
    # extra averaging folds in as 1/sqrt(multiplier)
    assert projected_scenario(scan_multiplier=4.0).phase_bound == \
        pytest.approx(0.5 * proj.phase_bound, rel=1e-12)
    with pytest.raises(ValueError):
        projected_scenario(scan_multiplier=0.0)


def test_projected_improves_on_current():
    lam = 20e-6
    current = bound_at_lambda(lam, default_experiment())
    projected = bound_at_lambda(lam, projected_scenario())
    assert projected < current
    assert 1e2 <= current / projected <= 1e5
