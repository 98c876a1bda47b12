"""Point-interaction physics: radial profile, vector structure, unit
conversions. Reference numbers are 40-digit evaluations of the same
closed expressions, frozen here."""

import math

import numpy as np
import pytest

from spinforce.constants import CODATA2014
from spinforce.core import (Displacement, alp_mass_to_lambda,
                            effective_field_point, lambda_to_alp_mass,
                            potential_monopole_dipole)

Z_HAT = np.array([0.0, 0.0, 1.0])


def test_potential_reference_value():
    # r = lam = 1 m, aligned spin, g = 1: prefactor * 2/e
    v = potential_monopole_dipole(Z_HAT, 1.0, 1.0, Z_HAT)
    assert v == pytest.approx(3.5740364125084584e-40, rel=1e-14)


def test_potential_projection_and_linearity():
    r = np.array([0.3e-6, -0.2e-6, 0.9e-6])
    sigma = np.array([1.0, 0.0, 0.0])
    v = potential_monopole_dipole(r, 5e-6, 2e-14, sigma)
    v_flipped = potential_monopole_dipole(r, 5e-6, 2e-14, -sigma)
    assert v_flipped == -v
    v_double = potential_monopole_dipole(r, 5e-6, 4e-14, sigma)
    assert v_double == pytest.approx(2.0 * v, rel=1e-15)
    # perpendicular spin sees nothing
    perp = np.cross(r / np.linalg.norm(r), sigma)
    perp /= np.linalg.norm(perp)
    assert abs(potential_monopole_dipole(r, 5e-6, 2e-14, perp)) < abs(v) * 1e-12


def test_zeeman_consistency():
    """V equals (gamma hbar / 2) sigma_hat . B for the same displacement:
    the potential and the effective field are two forms of one interaction."""
    rng = np.random.default_rng(11)
    for _ in range(10):
        vec = rng.uniform(-1.0, 1.0, size=3) * 1e-6
        if np.linalg.norm(vec) < 1e-8:
            continue
        sigma = rng.normal(size=3)
        sigma /= np.linalg.norm(sigma)
        lam = 10.0 ** rng.uniform(-7, -4)
        g = 10.0 ** rng.uniform(-16, -10)
        v = potential_monopole_dipole(vec, lam, g, sigma)
        b = effective_field_point(vec, lam, g)
        zeeman = 0.5 * CODATA2014.gyromagnetic_ratio * CODATA2014.hbar * np.dot(sigma, b)
        assert zeeman == pytest.approx(v, rel=1e-12)


def test_field_direction_and_falloff():
    b_near = effective_field_point(0.5e-6 * Z_HAT, 20e-6, 1e-14)
    b_far = effective_field_point(5e-6 * Z_HAT, 20e-6, 1e-14)
    assert b_near[2] > 0.0 and b_far[2] > 0.0
    assert abs(b_near[0]) == 0.0 and abs(b_near[1]) == 0.0
    assert b_near[2] > b_far[2]
    # beyond many force ranges the field is exponentially gone
    b_gone = effective_field_point(100e-6 * Z_HAT, 1e-6, 1e-14)
    assert abs(b_gone[2]) < b_far[2] * 1e-30


def test_field_negative_coupling_flips():
    b = effective_field_point(Z_HAT * 1e-6, 5e-6, 3e-15)
    b_neg = effective_field_point(Z_HAT * 1e-6, 5e-6, -3e-15)
    np.testing.assert_allclose(b_neg, -b, rtol=1e-15)


def test_mass_conversions_frozen():
    assert lambda_to_alp_mass(20e-6) == pytest.approx(9.8663489391582439e-3, rel=1e-14)
    assert alp_mass_to_lambda(0.01) == pytest.approx(1.9732697878316488e-5, rel=1e-14)


def test_mass_conversions_roundtrip():
    for lam in [1e-8, 0.5e-6, 20e-6, 3e-3]:
        assert alp_mass_to_lambda(lambda_to_alp_mass(lam)) == pytest.approx(lam, rel=1e-14)


def test_displacement_derived_fields():
    d = Displacement(np.array([3.0, 0.0, 4.0]))
    assert d.r == pytest.approx(5.0)
    np.testing.assert_allclose(d.r_hat, [0.6, 0.0, 0.8])


@pytest.mark.parametrize("bad", [np.zeros(3), np.array([1.0, 2.0]),
                                 np.array([np.nan, 0.0, 1.0]),
                                 np.array([np.inf, 0.0, 1.0])])
def test_displacement_rejects(bad):
    with pytest.raises(ValueError):
        Displacement(bad)


def test_input_validation():
    with pytest.raises(ValueError):
        potential_monopole_dipole(Z_HAT, -1.0, 1.0, Z_HAT)
    with pytest.raises(ValueError):
        potential_monopole_dipole(Z_HAT, 1.0, math.nan, Z_HAT)
    with pytest.raises(ValueError):
        potential_monopole_dipole(Z_HAT, 1.0, 1.0, 2.0 * Z_HAT)  # not unit
    with pytest.raises(ValueError):
        lambda_to_alp_mass(0.0)
    with pytest.raises(ValueError):
        alp_mass_to_lambda(-0.01)
