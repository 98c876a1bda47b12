import dataclasses

import pytest

from spinforce.constants import CODATA2014, PhysicalConstants


def test_pinned_values():
    assert CODATA2014.hbar == 1.054571800e-34
    assert CODATA2014.electron_mass == 9.10938356e-31
    assert CODATA2014.gyromagnetic_ratio == 1.760859644e11
    assert CODATA2014.speed_of_light == 299792458.0
    assert CODATA2014.ev_to_joule == 1.6021766208e-19


def test_hbar_c_product():
    assert CODATA2014.hbar_c == pytest.approx(
        1.054571800e-34 * 299792458.0, rel=1e-15)
    # and in eV metres, against a 40-digit evaluation
    assert CODATA2014.hbar_c / CODATA2014.ev_to_joule == pytest.approx(
        1.9732697878316488e-7, rel=1e-15)


def test_frozen():
    with pytest.raises(dataclasses.FrozenInstanceError):
        CODATA2014.hbar = 1.0


@pytest.mark.parametrize("field", ["hbar", "electron_mass", "gyromagnetic_ratio",
                                   "speed_of_light", "ev_to_joule"])
@pytest.mark.parametrize("bad", [0.0, -1.0, float("nan"), float("inf")])
def test_rejects_nonpositive(field, bad):
    with pytest.raises(ValueError):
        PhysicalConstants(**{field: bad})
