import math

import mpmath
import numpy as np
import pytest

from app.core.errors import DomainError
from app.services.special_functions import (
    assoc_legendre_real,
    bessel_half,
    bessel_half_sequence,
    debye_bessel,
    debye_factors,
    legendre_log_sequence,
    wronskian_residual,
)


def test_lowest_order_matches_closed_forms():
    x = 1.3
    pair = bessel_half(0, x)
    assert pair.order == 0.5
    assert pair.i_val == pytest.approx(math.sqrt(2 / (math.pi * x)) * math.sinh(x), rel=1e-13)
    assert pair.k_val == pytest.approx(math.sqrt(math.pi / (2 * x)) * math.exp(-x), rel=1e-13)
    assert pair.i_combo == pytest.approx(pair.i_val * x / math.tanh(x), rel=1e-13)
    assert pair.k_combo == pytest.approx(-x * pair.k_val, rel=1e-13)


@pytest.mark.parametrize("x", [0.1, 1.0, 10.0, 100.0])
def test_log_sequence_matches_mpmath(x):
    seq = bessel_half_sequence(50, x)
    for l in (0, 1, 7, 23, 50):
        nu = mpmath.mpf(l) + 0.5
        log_i = float(mpmath.log(mpmath.besseli(nu, x))) - x
        log_k = float(mpmath.log(mpmath.besselk(nu, x))) + x
        assert seq.log_i[l] == pytest.approx(log_i, abs=1e-10)
        assert seq.log_k[l] == pytest.approx(log_k, abs=1e-10)


def test_combinations_match_mpmath_derivatives():
    l, x = 5, 3.0
    nu = mpmath.mpf(l) + 0.5
    i_prime = (mpmath.besseli(nu - 1, x) + mpmath.besseli(nu + 1, x)) / 2
    k_prime = -(mpmath.besselk(nu - 1, x) + mpmath.besselk(nu + 1, x)) / 2
    pair = bessel_half(l, x)
    assert pair.i_combo == pytest.approx(float(mpmath.besseli(nu, x) / 2 + x * i_prime), rel=1e-10)
    assert pair.k_combo == pytest.approx(float(mpmath.besselk(nu, x) / 2 + x * k_prime), rel=1e-10)


def test_wronskian_vanishes():
    assert abs(wronskian_residual(bessel_half(5, 3.0))) <= 1e-12
    assert abs(wronskian_residual(bessel_half(40, 2500.0, scaled=True))) <= 1e-10


def test_scaled_values_survive_large_arguments():
    pair = bessel_half(3, 2000.0, scaled=True)
    assert pair.scaled
    # e^{-x} I and e^{x} K both behave like 1/sqrt(x) asymptotically
    assert pair.i_val == pytest.approx(1 / math.sqrt(2 * math.pi * 2000.0), rel=1e-2)
    assert pair.k_val == pytest.approx(math.sqrt(math.pi / (2 * 2000.0)), rel=1e-2)


def test_unscaled_overflow_is_rejected():
    with pytest.raises(DomainError):
        bessel_half(2, 701.0)
    with pytest.raises(DomainError):
        bessel_half(2, 0.0)
    with pytest.raises(DomainError):
        bessel_half(-1, 1.0)


X = 1.7
S = math.sqrt(X ** 2 - 1)
EXPLICIT = {
    (0, 0): 1.0,
    (1, 0): X,
    (2, 0): (3 * X ** 2 - 1) / 2,
    (3, 0): (5 * X ** 3 - 3 * X) / 2,
    (4, 0): (35 * X ** 4 - 30 * X ** 2 + 3) / 8,
    (1, 1): S,
    (2, 1): 3 * X * S,
    (3, 1): 1.5 * (5 * X ** 2 - 1) * S,
    (2, 2): 3 * S ** 2,
    (3, 2): 15 * X * S ** 2,
    (4, 2): 7.5 * (7 * X ** 2 - 1) * S ** 2,
    (3, 3): 15 * S ** 3,
    (4, 4): 105 * S ** 4,
}


@pytest.mark.parametrize("l,m", sorted(EXPLICIT))
def test_legendre_matches_explicit_forms(l, m):
    assert assoc_legendre_real(l, m, X).p == pytest.approx(EXPLICIT[(l, m)], rel=1e-12)


def test_legendre_value_and_derivative_example():
    value = assoc_legendre_real(2, 1, 2.0)
    assert value.p == pytest.approx(6 * math.sqrt(3), rel=1e-13)
    assert value.dp == pytest.approx(21.0, rel=1e-13)


def test_legendre_sequence_is_vectorised_over_x():
    x = np.array([1.1, 2.0, 30.0])
    log_p, dp_ratio = legendre_log_sequence(6, 2, x)
    assert log_p.shape == (5, 3)
    assert dp_ratio.shape == (5, 3)
    for col, xv in enumerate(x):
        assert log_p[-1, col] == pytest.approx(math.log(assoc_legendre_real(6, 2, xv).p), rel=1e-12)


def test_legendre_domain():
    with pytest.raises(DomainError):
        assoc_legendre_real(2, 3, 2.0)
    with pytest.raises(DomainError):
        assoc_legendre_real(2, -1, 2.0)
    with pytest.raises(DomainError):
        assoc_legendre_real(2, 1, 1.0)


def test_debye_factor_examples():
    f = debye_factors(1.0)
    assert f.eta == pytest.approx(0.53284, abs=1e-5)
    assert f.tau_z == pytest.approx(1 / math.sqrt(2), rel=1e-14)
    assert debye_factors(1e-8).u1 == pytest.approx(-1 / 12, abs=1e-12)
    with pytest.raises(DomainError):
        debye_factors(0.0)


@pytest.mark.parametrize("z", [0.5, 1.0, 2.0])
def test_debye_agrees_with_recurrence_at_large_order(z):
    l = 100
    x = (l + 0.5) * z
    seq = bessel_half_sequence(l, x)
    approx = debye_bessel(l, z)
    log_i = seq.log_i[l] + x
    log_k = seq.log_k[l] - x
    assert approx.log_i == pytest.approx(log_i, abs=1e-4)
    assert approx.log_k == pytest.approx(log_k, abs=1e-4)
    assert approx.log_i_combo == pytest.approx(log_i + math.log(seq.g[l]), abs=1e-4)
    assert approx.log_k_combo == pytest.approx(log_k + math.log(-seq.h[l]), abs=1e-4)


def test_debye_values_restore_sign():
    i_val, i_combo, k_val, k_combo = debye_bessel(20, 1.0).values()
    assert i_val > 0 and i_combo > 0 and k_val > 0
    assert k_combo < 0
