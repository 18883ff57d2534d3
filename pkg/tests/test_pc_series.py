import math

import mpmath
import numpy as np
import pytest

from app.core.constants import CONSTANTS
from app.core.errors import DomainError, RangeError
from app.models.quantity import Kind
from app.schemas.geometry import Geometry
from app.schemas.material import DielectricModel
from app.services import ntlo, pc_series
from app.services.pc_series import beta, lambda_, pc_series_eval


def test_tabulated_examples():
    assert float(beta(1, 0)) == pytest.approx(-4 / 3, rel=1e-15)
    assert float(beta(3, 0)) == pytest.approx(-16 / 7 + 32 * math.pi ** 2 / 735, rel=1e-14)
    assert float(beta(3, 0)) == pytest.approx(-1.8560, abs=1e-4)
    assert float(lambda_(0, 0)) == pytest.approx(1 / 3 - 20 / math.pi ** 2, rel=1e-14)


def test_exact_values_carry_extra_precision():
    with mpmath.workdps(40):
        expected = mpmath.mpf(1) / 3 - 20 / mpmath.pi ** 2
        assert abs(lambda_(0, 0).to_mpf(dps=40) - expected) < mpmath.mpf(10) ** -35


def test_beta_is_symmetric_lambda_is_not():
    for i in range(pc_series.MAX_ORDER + 1):
        for j in range(pc_series.MAX_ORDER + 1 - i):
            assert beta(i, j) == beta(j, i)
    assert float(lambda_(1, 0)) != pytest.approx(float(lambda_(0, 1)))


def test_orders_outside_the_table():
    with pytest.raises(RangeError):
        beta(3, 3)
    with pytest.raises(RangeError):
        lambda_(-1, 0)
    with pytest.raises(RangeError):
        pc_series_eval(Kind.ENERGY, 0.0, 0.0, 0.01, max_order=6)
    with pytest.raises(DomainError):
        pc_series_eval(Kind.ENERGY, -0.1, 0.0, 0.01)


def test_exact_strings():
    assert str(beta(0, 0)) == "1"
    assert str(beta(3, 0)) == "-16/7 + 32/735*pi^2"
    assert str(lambda_(0, 0)) == "-20/pi^2 + 1/3"


@pytest.mark.parametrize("kind", list(Kind))
def test_perfect_conductor_limit(kind):
    e = 0.01
    assert pc_series_eval(kind, 0.0, 0.0, 0.0) == 1.0
    assert pc_series_eval(kind, 0.0, 0.0, e) == pytest.approx(1 + e * ntlo.pc_theta(kind), rel=1e-14)


def test_gradient_example():
    assert pc_series_eval(Kind.GRADIENT, 0.0, 0.0, 0.01) == pytest.approx(0.994356, abs=1e-6)


def test_first_order_in_a():
    a = 0.01
    assert pc_series_eval(Kind.ENERGY, a, a, 0.0, max_order=1) == pytest.approx(1 - 8 / 3 * a, rel=1e-14)
    # force weights order n by (n + 2)/2
    assert pc_series_eval(Kind.FORCE, a, 0.0, 0.0, max_order=1) == pytest.approx(1 - 1.5 * 4 / 3 * a, rel=1e-14)


def test_leading_series_is_symmetric_in_the_media():
    for kind in Kind:
        assert pc_series_eval(kind, 0.02, 0.05, 0.0) == pytest.approx(pc_series_eval(kind, 0.05, 0.02, 0.0), rel=1e-14)
    assert pc_series_eval(Kind.ENERGY, 0.02, 0.05, 0.01) != pytest.approx(
        pc_series_eval(Kind.ENERGY, 0.05, 0.02, 0.01), rel=1e-12,
    )


def test_table_rows():
    betas = pc_series.table_rows("beta")
    lambdas = pc_series.table_rows("lambda")
    assert len(betas) == 12
    assert len(lambdas) == 21
    assert (betas[0].i, betas[0].j, betas[0].exact, betas[0].decimal) == (0, 0, "1", 1.0)
    assert [r.i + r.j for r in lambdas] == sorted(r.i + r.j for r in lambdas)
    with pytest.raises(DomainError):
        pc_series.table_rows("gamma")


def test_fit_leading_slope_on_synthetic_data():
    a = np.linspace(0.002, 0.02, 8)
    values = 1 - 8 / 3 * a + 5.4 * a ** 2
    assert pc_series.fit_leading_slope(values, a) == pytest.approx(-8 / 3, rel=1e-10)
    with pytest.raises(DomainError):
        pc_series.fit_leading_slope(values[:3], a)


@pytest.mark.slow
def test_engine_recovers_first_order_coefficient(material_quad):
    d = 1e-6
    geom = Geometry.of(R=1e-2, d=d)
    a = np.array([1 / 400, 1 / 200, 1 / 100, 1 / 50])
    values = []
    for ai in a:
        model = DielectricModel.plasma(CONSTANTS.c / (ai * d))
        values.append(ntlo.compute(Kind.ENERGY, model, model, geom, material_quad).normalized_leading)
    assert pc_series.fit_leading_slope(values, a) == pytest.approx(-8 / 3, rel=0.02)
