import math

import numpy as np
import pytest

from app.core.errors import ConvergenceError
from app.services.quadrature import (
    GRADED_DEPTH,
    SeriesAccumulator,
    adaptive_gauss_legendre,
    gauss_laguerre,
    gauss_legendre,
    graded_laguerre,
    graded_legendre,
    power_law_tail,
    reduced_grid,
    sum_series,
)

ZETA3 = 1.2020569031595942


def test_gauss_legendre_is_exact_for_polynomials():
    x, w = gauss_legendre(3, 0.0, 2.0)
    assert np.all((x > 0) & (x < 2))
    assert np.dot(w, x ** 4) == pytest.approx(32 / 5, rel=1e-13)
    assert w.sum() == pytest.approx(2.0, rel=1e-14)


def test_gauss_laguerre_moments():
    u, w = gauss_laguerre(4)
    assert np.dot(w, u ** 3) == pytest.approx(6.0, rel=1e-12)
    assert np.dot(w, u ** 7) == pytest.approx(5040.0, rel=1e-12)


def test_cached_rules_are_read_only():
    x, _ = gauss_laguerre(5)
    with pytest.raises(ValueError):
        x[0] = 1.0


def test_adaptive_integration_of_exponential():
    result = adaptive_gauss_legendre(np.exp, 0.0, 3.0, n=8, rel_tol=1e-12, max_depth=10)
    assert result.value == pytest.approx(math.expm1(3.0), rel=1e-12)
    assert result.intervals >= 2


def test_adaptive_integration_refines_a_peak():
    result = adaptive_gauss_legendre(
        lambda x: 1.0 / (1e-4 + x ** 2), -1.0, 1.0, n=8, rel_tol=1e-10, max_depth=30,
    )
    assert result.value == pytest.approx(2 * math.atan(100.0) / 1e-2, rel=1e-8)
    assert result.intervals > 2


def test_adaptive_integration_reports_failure():
    with pytest.raises(ConvergenceError) as info:
        adaptive_gauss_legendre(lambda x: np.abs(x) ** -0.9, -1.0, 1.0, n=4, rel_tol=1e-12, max_depth=2)
    assert info.value.estimate is not None
    assert info.value.diagnostics["max_depth"] == 2


def test_power_law_tail_recovers_zeta3():
    n = 50
    partial = sum(1.0 / k ** 3 for k in range(1, n + 1))
    tail = power_law_tail(1.0 / (n - 1) ** 3, 1.0 / n ** 3, n)
    assert partial + tail == pytest.approx(ZETA3, rel=1e-9)


def test_power_law_tail_declines_to_guess():
    assert power_law_tail(1.0, -0.5, 10) == 0.0
    assert power_law_tail(0.5, 1.0, 10) == 0.0
    assert power_law_tail(1.0, 0.0, 10) == 0.0
    # decay slower than 1/n has no finite tail
    assert power_law_tail(1.0 / math.sqrt(9), 1.0 / math.sqrt(10), 10) == 0.0


def test_geometric_series_converges():
    result = sum_series(lambda s: np.array([0.5 ** s]), rel_tol=1e-14, s_max=200)
    assert result.converged
    assert result.value[0] == pytest.approx(2.0, rel=1e-13)
    assert result.terms < 200


def test_vector_series_settles_per_component():
    result = sum_series(
        lambda s: np.array([1.0 / (s + 1) ** 4, 0.1 ** s]),
        rel_tol=[1e-9, 1e-12],
        s_max=5000,
    )
    assert result.value[0] == pytest.approx(math.pi ** 4 / 90, rel=1e-8)
    assert result.value[1] == pytest.approx(1 / 0.9, rel=1e-12)


def test_slowly_decaying_series_does_not_settle():
    with pytest.raises(ConvergenceError) as info:
        sum_series(lambda s: np.array([1.0 / math.sqrt(s + 1)]), rel_tol=1e-6, s_max=100, label="root series")
    assert info.value.diagnostics["s_reached"] == 100
    assert "root series" in str(info.value)
    assert info.value.estimate == pytest.approx(sum(1.0 / math.sqrt(k) for k in range(1, 101)), rel=1e-12)


def test_non_finite_term_is_reported():
    acc = SeriesAccumulator(1e-8, s_max=10)
    acc.add([1.0])
    with pytest.raises(ConvergenceError) as info:
        acc.add([float("nan")])
    assert info.value.diagnostics["s_reached"] == 1
    assert info.value.estimate == 1.0


def test_graded_legendre_handles_a_square_root_at_zero():
    x, w = graded_legendre(32, 12, 16)
    assert np.all((x > 0) & (x <= 1))
    assert np.dot(w, np.sqrt(x)) == pytest.approx(2 / 3, rel=1e-11)


def test_graded_legendre_resolves_a_thin_layer():
    delta = 1e-6
    x, w = graded_legendre(32, 12, 16)
    lower = GRADED_DEPTH
    expected = delta / (lower + delta) - delta / (1 + delta)
    assert np.dot(w, delta / (x + delta) ** 2) == pytest.approx(expected, rel=1e-9)
    # a plain rule of the same size misses the layer
    xp, wp = gauss_legendre(len(x), 0.0, 1.0)
    assert abs(np.dot(wp, delta / (xp + delta) ** 2) - expected) > 1e-3


def test_graded_legendre_scales_with_the_interval():
    x, w = graded_legendre(24, 12, 16, length=0.5 * math.pi)
    assert x.max() < 0.5 * math.pi
    assert np.dot(w, np.cos(x)) == pytest.approx(1.0, rel=1e-11)


def test_graded_laguerre_moments():
    u, w = graded_laguerre(12, 16)
    assert np.dot(w, np.sqrt(u)) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-9)
    assert np.dot(w, u ** 2) == pytest.approx(2.0, rel=1e-9)


def test_graded_reduced_grid_reaches_grazing_angles():
    grid = reduced_grid(48, 40, graded=True, panels=12, panel_nodes=16)
    assert grid.shape == (48 + 12 * 16, 12 * 16)
    assert np.all(grid.cos_tau > 0)
    assert grid.cos_tau.min() < 1e-10
    np.testing.assert_allclose(grid.tau ** 2 + grid.cos_tau ** 2, 1.0, rtol=1e-15)
    # int_0^{pi/2} sin(phi) dphi and int_0^inf e^{-u} du
    assert grid.phi_weight.sum() == pytest.approx(1.0, rel=1e-11)
    assert grid.u_weight.sum() == pytest.approx(1.0, rel=1e-9)


def test_plain_reduced_grid_uses_the_requested_nodes():
    grid = reduced_grid(32, 16)
    assert grid.shape == (32, 16)
    assert grid.phi_weight.sum() == pytest.approx(1.0, rel=1e-13)
