import math

import mpmath
import numpy as np
import pytest

from app.core.errors import AssemblyError, DomainError
from app.models.quantity import Kind
from app.schemas.geometry import Geometry
from app.schemas.quadrature import QuadratureSpec, TruncationSpec
from app.services import ntlo, oracle
from app.services.dielectric import PERFECT_CONDUCTOR


def _mie_reference(l, omega, eps):
    """Sphere coefficients straight from mpmath Bessel functions."""
    nu = mpmath.mpf(l) + 0.5
    n = mpmath.sqrt(eps)

    def g(x):
        i = mpmath.besseli(nu, x)
        di = (mpmath.besseli(nu - 1, x) + mpmath.besseli(nu + 1, x)) / 2
        return (i / 2 + x * di) / i

    k = mpmath.besselk(nu, omega)
    dk = -(mpmath.besselk(nu - 1, omega) + mpmath.besselk(nu + 1, omega)) / 2
    h = (k / 2 + omega * dk) / k
    ratio = mpmath.besseli(nu, omega) / k
    te = ratio * (g(n * omega) - g(omega)) / (g(n * omega) - h)
    tm = ratio * (g(n * omega) - eps * g(omega)) / (g(n * omega) - eps * h)
    return float(te), float(tm)


def test_mie_coefficients_match_mpmath():
    te, tm = _mie_reference(1, 1.0, 2.0)
    pair = oracle.mie_coefficients(1, 1.0, 2.0)
    assert pair.te == pytest.approx(te, rel=1e-10)
    assert pair.tm == pytest.approx(tm, rel=1e-10)


@pytest.mark.parametrize("eps", [1.5, 10.0, PERFECT_CONDUCTOR])
@pytest.mark.parametrize("l", [1, 4, 12])
def test_mie_signs(l, eps):
    pair = oracle.mie_coefficients(l, 2.5, eps)
    assert pair.te > 0
    assert pair.tm < 0


def test_vacuum_sphere_does_not_scatter():
    assert oracle.mie_coefficients(2, 1.0, 1.0) == (0.0, 0.0)


def test_mie_domain():
    with pytest.raises(DomainError):
        oracle.mie_coefficients(0, 1.0, 2.0)
    with pytest.raises(DomainError):
        oracle.mie_coefficients(1, 1.0, 0.5)
    with pytest.raises(DomainError):
        oracle.mie_coefficients(1, 0.0, 2.0)


@pytest.mark.parametrize("eps", [4.0, PERFECT_CONDUCTOR])
def test_debye_mie_agrees_at_large_order(eps):
    exact = oracle.mie_coefficients(60, 30.0, eps)
    approx = oracle.debye_mie(60, 30.0, eps)
    assert approx.te == pytest.approx(exact.te, rel=1e-3)
    assert approx.tm == pytest.approx(exact.tm, rel=1e-3)


def test_axisymmetric_block_does_not_mix_polarisations():
    block = oracle.matrix_element(2, 3, 0, 3.0, PERFECT_CONDUCTOR, PERFECT_CONDUCTOR, 1.5)
    assert block[0, 1] == 0.0
    assert block[1, 0] == 0.0
    assert block[0, 0] != 0.0


@pytest.mark.parametrize("l1,l2,m", [(2, 3, 1), (3, 3, 2), (5, 2, 2), (6, 6, 5)])
@pytest.mark.parametrize("eps", [5.0, PERFECT_CONDUCTOR])
def test_opposite_m_flip_only_the_mixing_entries(l1, l2, m, eps):
    plus = oracle.matrix_element(l1, l2, m, 2.0, eps, 8.0, 1.0)
    minus = oracle.matrix_element(l1, l2, -m, 2.0, eps, 8.0, 1.0)
    np.testing.assert_allclose(np.diag(minus), np.diag(plus), rtol=1e-14)
    assert minus[0, 1] == pytest.approx(-plus[0, 1], rel=1e-14)
    assert minus[1, 0] == pytest.approx(-plus[1, 0], rel=1e-14)
    assert plus[0, 1] != 0.0


@pytest.mark.parametrize("m", [1, 2])
def test_opposite_m_share_the_round_trip_determinant(m):
    ls = range(max(1, m), 6)

    def assembled(sign):
        return np.vstack([
            np.hstack([oracle.matrix_element(l, lp, sign * m, 2.0, 5.0, 8.0, 1.0) for lp in ls])
            for l in ls
        ])

    plus, minus = assembled(1), assembled(-1)
    assert not np.allclose(plus, minus)
    sign_p, log_p = np.linalg.slogdet(np.eye(len(plus)) - plus)
    sign_m, log_m = np.linalg.slogdet(np.eye(len(minus)) - minus)
    assert sign_p == sign_m
    assert log_m == pytest.approx(log_p, rel=1e-10, abs=1e-14)


def test_matrix_elements_decay_with_separation():
    scaled = []
    for kappa_l in (0.5, 1.0, 2.0, 4.0, 8.0):
        block = oracle.matrix_element(1, 1, 0, kappa_l, PERFECT_CONDUCTOR, PERFECT_CONDUCTOR, 0.3)
        scaled.append(np.linalg.norm(block) * math.exp(2 * kappa_l))
    assert all(a > b for a, b in zip(scaled, scaled[1:]))


def test_matrix_element_domain():
    with pytest.raises(DomainError):
        oracle.matrix_element(1, 2, 2, 1.0, 2.0, 2.0, 0.5)
    with pytest.raises(DomainError):
        oracle.round_trip_block(0, -1.0, 0.5, 2.0, 2.0, 3, 40)


def test_vacuum_blocks_vanish():
    assert not oracle.matrix_element(2, 2, 1, 1.0, 1.0, 3.0, 0.5).any()


def test_log_det_of_contraction():
    assert oracle.log_det_one_minus(0.5 * np.eye(3)) == pytest.approx(3 * math.log(0.5), rel=1e-14)
    rotation = np.array([[0.0, 0.3], [-0.3, 0.0]])
    assert oracle.log_det_one_minus(rotation) == pytest.approx(math.log(1.09), rel=1e-14)
    with pytest.raises(AssemblyError):
        oracle.log_det_one_minus(np.array([[2.0]]))


def test_truncation_defaults():
    spec = TruncationSpec()
    assert spec.resolved_l_max(0.1) == 80
    assert spec.resolved_l_max(1e-3) == spec.l_max_cap
    assert TruncationSpec(l_max=7).resolved_l_max(0.1) == 7
    assert oracle.theta_node_count(10, 40) == 40
    assert oracle.theta_node_count(100, 40) == 120
    assert oracle.theta_node_count(500, 40) == oracle.MAX_THETA_NODES


def test_vacuum_energy_is_zero(vacuum, pc):
    result = oracle.exact_energy_details(vacuum, pc, Geometry.of(R=1e-6, d=1e-6))
    assert result.value == 0.0


def test_far_sphere_follows_casimir_polder(pc):
    geom = Geometry.of(R=1e-6, d=99e-6)
    energy = oracle.exact_energy(pc, pc, geom)
    assert energy < 0
    assert energy == pytest.approx(oracle.casimir_polder_pc(geom), rel=0.05, abs=0)


def test_converged_energy_reports_its_trace(pc):
    geom = Geometry.of(R=1e-6, d=99e-6)
    converged = oracle.exact_energy_converged(pc, pc, geom, TruncationSpec(tolerance=1e-3), step=1)
    assert converged.trace[0][0] == 1
    assert converged.l_max == converged.trace[-1][0]
    assert len(converged.trace) >= 2
    assert converged.value == pytest.approx(oracle.casimir_polder_pc(geom), rel=0.05, abs=0)


@pytest.mark.slow
def test_close_sphere_matches_the_asymptotic_expansion(pc):
    geom = Geometry.of(R=1e-6, d=1e-7)
    exact = oracle.exact_energy(pc, pc, geom)
    expansion = ntlo.compute(Kind.ENERGY, pc, pc, geom, QuadratureSpec(refine=False)).total
    assert exact == pytest.approx(expansion, rel=0.05, abs=0)


@pytest.mark.slow
def test_residual_against_the_expansion_shrinks_with_separation(pc):
    R = 1e-6
    residuals = []
    for e in (0.1, 0.075, 0.05):
        geom = Geometry.of(R=R, d=e * R)
        exact = oracle.exact_energy(pc, pc, geom, TruncationSpec(l_max_cap=200))
        expansion = ntlo.compute(Kind.ENERGY, pc, pc, geom, QuadratureSpec(refine=False)).total
        residuals.append(abs(exact / expansion - 1.0))
    assert residuals[0] < 0.05
    assert residuals[0] > residuals[1] > residuals[2]
    # a quadratic tail drops by (0.05 / 0.1)^2 = 1/4 over the sweep
    assert residuals[2] < 0.5 * residuals[0]


@pytest.mark.slow
def test_energy_converges_monotonically_in_l_max(pc):
    geom = Geometry.of(R=1e-6, d=1e-7)
    energies = [oracle.exact_energy(pc, pc, geom, TruncationSpec(l_max=l)) for l in (20, 40, 60, 80)]
    magnitudes = [abs(v) for v in energies]
    assert all(a < b for a, b in zip(magnitudes, magnitudes[1:]))
    steps = [b - a for a, b in zip(magnitudes, magnitudes[1:])]
    assert all(a > b for a, b in zip(steps, steps[1:]))
