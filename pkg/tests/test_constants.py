import math

import pytest

from app.core.constants import CONSTANTS, dimensionless_groups, ev_to_angular_frequency
from app.core.errors import DomainError


def test_hbar_c_is_product():
    assert CONSTANTS.hbar_c == CONSTANTS.hbar * CONSTANTS.c
    assert CONSTANTS.c == 299792458.0


def test_ev_conversion_examples():
    assert ev_to_angular_frequency(0.0) == 0.0
    assert ev_to_angular_frequency(9.0) == pytest.approx(9.0 * 1.602176634e-19 / 1.054571817e-34, rel=1e-9)
    assert ev_to_angular_frequency(9.0) == pytest.approx(1.367e16, rel=1e-3)
    assert ev_to_angular_frequency(0.035) == pytest.approx(5.32e13, rel=1e-3)


def test_negative_energy_is_rejected():
    with pytest.raises(DomainError):
        ev_to_angular_frequency(-1.0)


def test_dimensionless_groups():
    omega_p = ev_to_angular_frequency(9.0)
    groups = dimensionless_groups(1e-3, 1e-4, omega_p=(omega_p,), gamma=(0.0,))
    assert groups.e == pytest.approx(0.1)
    assert groups.omega_d[0] == pytest.approx(4.56e3, rel=1e-3)
    assert groups.gamma_d == (0.0,)
    assert groups.a[0] == pytest.approx(1.0 / groups.omega_d[0])


def test_groups_are_homogeneous():
    omega_p = ev_to_angular_frequency(9.0)
    small = dimensionless_groups(1e-3, 1e-6, omega_p=(omega_p,))
    large = dimensionless_groups(1e-2, 1e-5, omega_p=(omega_p,))
    assert small.e == pytest.approx(large.e)
    assert large.omega_d[0] == pytest.approx(10.0 * small.omega_d[0])


@pytest.mark.parametrize("R, d", [(0.0, 1e-6), (1e-3, 0.0), (-1.0, 1.0)])
def test_non_positive_lengths_are_rejected(R, d):
    with pytest.raises(DomainError):
        dimensionless_groups(R, d)


def test_missing_medium_has_no_expansion_parameter():
    groups = dimensionless_groups(1.0, 0.1, omega_p=(0.0,))
    assert groups.a == (None,)
    assert math.isclose(groups.e, 0.1)
