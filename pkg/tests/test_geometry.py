"""Half-ball shape factor: closed form against the quadrature oracle,
stability across regimes, and the verification harness itself."""

import math

import numpy as np
import pytest

from spinforce.geometry import (ConvergenceError, SourceMass,
                                compare_closed_form_to_quadrature,
                                effective_field_mass, oracle_grid,
                                shape_factor_closed_form,
                                shape_factor_quadrature,
                                transverse_field_monte_carlo)

HEADLINE = dict(lam=20e-6, radius=250e-6, distance=0.5e-6)


def test_closed_form_frozen_value():
    # 40-digit evaluation of the same expression
    f = shape_factor_closed_form(**HEADLINE)
    assert f.value == pytest.approx(1.9339741133353542e-5, rel=1e-14)
    assert f.estimated_error == 0.0


def test_quadrature_matches_closed_form_spot():
    for lam, r, d in [(20e-6, 250e-6, 0.5e-6), (0.2e-6, 250e-6, 0.1e-6),
                      (5e-6, 100e-6, 2e-6), (1e-3, 500e-6, 0.05e-6)]:
        cf = shape_factor_closed_form(lam, r, d).value
        q = shape_factor_quadrature(lam, r, d, rel_tol=1e-9)
        assert q.value == pytest.approx(cf, rel=1e-6)
        assert q.estimated_error <= 1e-8 * abs(q.value) + 1e-320


def test_closed_form_broadcasts():
    lams = np.array([1e-6, 10e-6, 100e-6])
    f = shape_factor_closed_form(lams, 250e-6, 0.5e-6)
    assert f.value.shape == (3,)
    for i, lam in enumerate(lams):
        assert f.value[i] == shape_factor_closed_form(float(lam), 250e-6, 0.5e-6).value


def test_shape_factor_monotonicity():
    lams = np.geomspace(0.1e-6, 1e-3, 40)
    f_of_lam = shape_factor_closed_form(lams, 250e-6, 0.5e-6).value
    assert np.all(np.diff(f_of_lam) > 0.0)  # longer range sees more matter

    ds = np.linspace(0.05e-6, 10e-6, 40)
    f_of_d = shape_factor_closed_form(20e-6, 250e-6, ds).value
    assert np.all(np.diff(f_of_d) < 0.0)  # farther is weaker

    rs = np.linspace(50e-6, 500e-6, 40)
    f_of_r = shape_factor_closed_form(20e-6, rs, 0.5e-6).value
    assert np.all(np.diff(f_of_r) > 0.0)  # bigger ball is stronger


def test_deep_short_range_underflows_to_zero():
    # d/lam = 5000: every exponential underflows, which is the correct limit
    f = shape_factor_closed_form(1e-9, 250e-6, 5e-6)
    assert f.value == 0.0


def test_effective_field_headline():
    src = SourceMass(radius=250e-6, radius_uncertainty=2.5e-6,
                     nucleon_density=1.33e30)
    b = effective_field_mass(20e-6, src, 0.5e-6, 6.24e-15)
    assert b == pytest.approx(5.2761765130097209e-5, rel=1e-13)


def test_effective_field_linear_in_g_and_rho():
    src1 = SourceMass(radius=250e-6, radius_uncertainty=0.0, nucleon_density=1.33e30)
    src2 = SourceMass(radius=250e-6, radius_uncertainty=0.0, nucleon_density=2.66e30)
    b1 = effective_field_mass(20e-6, src1, 0.5e-6, 1e-15)
    assert effective_field_mass(20e-6, src1, 0.5e-6, 3e-15) == pytest.approx(3 * b1, rel=1e-14)
    assert effective_field_mass(20e-6, src2, 0.5e-6, 1e-15) == pytest.approx(2 * b1, rel=1e-14)


def test_oracle_sweep_passes():
    lams, ds, rs = oracle_grid(3, 3, 2)
    report = compare_closed_form_to_quadrature(lams, ds, rs, rel_tol=1e-9)
    assert report.n_points == 18
    assert report.passed(1e-6)


def test_verification_harness_catches_corruption():
    """The sweep must flag a closed form that is wrong by one part in 1e4."""
    def corrupted(lam, radius, distance):
        good = shape_factor_closed_form(lam, radius, distance)
        return type(good)(value=good.value * (1.0 + 1e-4),
                          estimated_error=good.estimated_error)

    lams, ds, rs = oracle_grid(2, 2, 1)
    report = compare_closed_form_to_quadrature(lams, ds, rs, rel_tol=1e-9,
                                               closed_form=corrupted)
    assert not report.passed(1e-6)
    assert report.max_rel_deviation == pytest.approx(1e-4, rel=1e-2)


def test_tightening_tolerance_does_not_worsen_agreement():
    cf = shape_factor_closed_form(**HEADLINE).value
    dev = {}
    for rel_tol in (1e-6, 1e-8, 1e-10):
        q = shape_factor_quadrature(rel_tol=rel_tol, **HEADLINE)
        dev[rel_tol] = abs(q.value - cf) / cf
    # allow rounding noise at the bottom
    floor = 1e-13
    assert dev[1e-8] <= dev[1e-6] + floor
    assert dev[1e-10] <= dev[1e-8] + floor


def test_quadrature_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        shape_factor_quadrature(20e-6, 250e-6, 0.5e-6, rel_tol=1e-2)
    with pytest.raises(ValueError):
        shape_factor_quadrature(20e-6, 250e-6, 0.5e-6, rel_tol=1e-12)


def test_convergence_error_carries_estimate():
    err = ConvergenceError("msg", best_estimate=1.5, estimated_error=0.1)
    assert err.best_estimate == 1.5
    assert err.estimated_error == 0.1
    assert isinstance(err, RuntimeError)


def test_geometry_validation():
    with pytest.raises(ValueError):
        shape_factor_closed_form(-1e-6, 250e-6, 0.5e-6)
    with pytest.raises(ValueError):
        shape_factor_closed_form(20e-6, 0.0, 0.5e-6)
    with pytest.raises(ValueError):
        shape_factor_closed_form(20e-6, 250e-6, -0.5e-6)
    # d = 0 (contact) is allowed
    assert shape_factor_closed_form(20e-6, 250e-6, 0.0).value > 0.0


def test_source_mass_validation():
    with pytest.raises(ValueError):
        SourceMass(radius=0.0, radius_uncertainty=0.0, nucleon_density=1e30)
    with pytest.raises(ValueError):
        SourceMass(radius=1e-4, radius_uncertainty=-1e-6, nucleon_density=1e30)
    with pytest.raises(ValueError):
        SourceMass(radius=1e-4, radius_uncertainty=2e-4, nucleon_density=1e30)
    with pytest.raises(ValueError):
        SourceMass(radius=1e-4, radius_uncertainty=0.0, nucleon_density=-1e30)


def test_transverse_field_vanishes():
    """Monte-Carlo volume average: the axial component dominates and the
    transverse components are zero within sampling error."""
    src = SourceMass(radius=250e-6, radius_uncertainty=0.0, nucleon_density=1.33e30)
    mean, std_err = transverse_field_monte_carlo(20e-6, src, 0.5e-6, 1e-14,
                                                 n_samples=8000, seed=3)
    # the variance is dominated by rare near-contact samples, so only a
    # consistency-with-zero statement is justified for the transverse parts
    assert mean[2] > 0.0
    for axis in (0, 1):
        assert abs(mean[axis]) <= 4.0 * std_err[axis] + 1e-300
