"""Parallel-plate Lifshitz energy and the proximity force approximation.

With w = kappa/q and q = v/(2 S u) the s-th term of the expanded logarithm
becomes a (v, w) integral under the Laguerre weight e^{-v}:

    E_par(u) = -(hbar c / 4 pi^2) sum_s S^{-1} (2 S u)^{-3} int v^2 e^{-v} dv int_0^1 dw
               sum_* (r1* r2*)^S

with eps evaluated at xi = c q w. A Drude medium takes log-graded rules in
v and towards w = 0, where its TE reflection switches off.
"""
import logging
import math
from typing import NamedTuple, Optional, Tuple

import numpy as np

from app.core.constants import CONSTANTS
from app.core.errors import DomainError
from app.models.quantity import Route
from app.schemas.geometry import Geometry
from app.schemas.material import DielectricModel
from app.schemas.quadrature import QuadratureSpec
from app.schemas.result import Diagnostics
from app.services.dielectric import has_damping_scale, permittivity
from app.services.quadrature import (
    adaptive_gauss_legendre,
    gauss_laguerre,
    gauss_legendre,
    graded_laguerre,
    graded_legendre,
    reduced_grid,
    sum_series,
)
from app.services.reflection import fresnel, fresnel_reduced

logger = logging.getLogger(__name__)


class _PlateMoments(NamedTuple):
    density: float
    derivative: float
    terms: int = 0
    tail: Tuple[float, float] = (0.0, 0.0)
    nodes: Tuple[int, int] = (0, 0)


class PfaResult(NamedTuple):
    value: float
    diagnostics: Diagnostics


def _eps_at(model: DielectricModel, xi):
    return permittivity(model, xi)


def _plate_rule(model1, model2, quad: QuadratureSpec):
    """(v, w_v, w, w_w): Laguerre rule in v and Legendre rule in w on (0, 1)."""
    if has_damping_scale(model1, model2):
        v, w_v = graded_laguerre(quad.graded_panels, quad.panel_nodes)
        w, w_w = graded_legendre(quad.w_nodes, quad.graded_panels, quad.panel_nodes)
    else:
        v, w_v = gauss_laguerre(quad.v_nodes)
        w, w_w = gauss_legendre(quad.w_nodes, 0.0, 1.0)
    return v, w_v, w, w_w


def _plate_moments(model1, model2, d: float, quad: QuadratureSpec) -> _PlateMoments:
    """Energy density and its d-derivative for two half-spaces at separation d."""
    if d <= 0:
        raise DomainError(f"separation must be positive, got {d}")
    if model1.is_vacuum or model2.is_vacuum:
        return _PlateMoments(0.0, 0.0)
    v, w_v, w, w_w = _plate_rule(model1, model2, quad)
    nodes = (len(w), len(v))
    v = v[:, None]
    w = w[None, :]
    weight = w_v[:, None] * w_w[None, :]

    def term(s: int) -> np.ndarray:
        S = s + 1
        q = v / (2.0 * S * d)
        xi = CONSTANTS.c * q * w
        r1 = fresnel(_eps_at(model1, xi), w, 1.0)
        r2 = fresnel(_eps_at(model2, xi), w, 1.0)
        products = (np.asarray(r1.te) * r2.te) ** S + (np.asarray(r1.tm) * r2.tm) ** S
        base = weight * products * np.ones_like(xi)
        scale = 1.0 / (S * (2.0 * S * d) ** 3)
        return np.array([
            scale * np.sum(base * v ** 2),
            scale * np.sum(base * v ** 3) / d,
        ])

    series = sum_series(term, quad.rel_tol_leading, quad.s_max, label="Lifshitz s-series")
    factor = CONSTANTS.hbar_c / (4.0 * math.pi ** 2)
    return _PlateMoments(
        -factor * series.value[0],
        factor * series.value[1],
        series.terms,
        (-factor * float(series.tail[0]), factor * float(series.tail[1])),
        nodes,
    )


def lifshitz_density(model1, model2, d: float, quad: Optional[QuadratureSpec] = None) -> float:
    """Casimir energy per unit area of two parallel half-spaces, J/m^2."""
    return _plate_moments(model1, model2, d, quad or QuadratureSpec()).density


def _moments_diagnostics(moments: _PlateMoments, index: int, scale: float, route: str) -> Diagnostics:
    value = moments.density if index == 0 else moments.derivative
    tail = scale * moments.tail[index]
    return Diagnostics(
        s_reached=moments.terms,
        tail_estimate=tail,
        phi_nodes=moments.nodes[0],
        t_nodes=moments.nodes[1],
        error_estimate=abs(moments.tail[index] / value) if value else 0.0,
        notes={"route": route},
    )


def _energy_lifshitz_route(model1, model2, geom: Geometry, quad: QuadratureSpec) -> PfaResult:
    d = geom.d
    deepest = [0]

    def integrand(x: np.ndarray) -> np.ndarray:
        # u = 2d/(1 - x) maps (-1, 1) onto (d, inf)
        u = 2.0 * d / (1.0 - x)
        jacobian = 2.0 * d / (1.0 - x) ** 2
        moments = [_plate_moments(model1, model2, ui, quad) for ui in u]
        deepest[0] = max([deepest[0]] + [m.terms for m in moments])
        return np.array([m.density for m in moments]) * jacobian

    estimate = adaptive_gauss_legendre(
        integrand, -1.0, 1.0, quad.u_nodes, quad.rel_tol_leading, quad.max_depth
    )
    logger.debug("Lifshitz route: %d intervals, error %.3g", estimate.intervals, estimate.error)
    v, _, w, _ = _plate_rule(model1, model2, quad)
    return PfaResult(
        2.0 * math.pi * geom.R * estimate.value,
        Diagnostics(
            s_reached=deepest[0],
            phi_nodes=len(w),
            t_nodes=len(v),
            error_estimate=abs(estimate.error / estimate.value) if estimate.value else 0.0,
            notes={"route": Route.LIFSHITZ_INTEGRAL.value, "intervals": estimate.intervals},
        ),
    )


def _energy_reduced_route(model1, model2, geom: Geometry, quad: QuadratureSpec) -> PfaResult:
    """-(hbar c/(4 pi R e^2)) sum_s S^{-2} int tau/sqrt(1-tau^2) int t e^{-2tS} sum_* (r1 r2)^S."""
    if model1.is_vacuum or model2.is_vacuum:
        return PfaResult(0.0, Diagnostics(notes={"route": Route.REDUCED_DOUBLE_INTEGRAL.value}))
    grid = reduced_grid(
        quad.phi_nodes,
        quad.t_nodes,
        graded=has_damping_scale(model1, model2),
        panels=quad.graded_panels,
        panel_nodes=quad.panel_nodes,
    )
    tau, cos_tau, u = grid.tau, grid.cos_tau, grid.u
    weight = grid.phi_weight * grid.u_weight * u
    cos2 = cos_tau ** 2

    def term(s: int) -> np.ndarray:
        S = s + 1
        t = u / (2.0 * S)
        xi = CONSTANTS.c * t * cos_tau / geom.d
        r1 = fresnel_reduced(_eps_at(model1, xi), tau, cos2)
        r2 = fresnel_reduced(_eps_at(model2, xi), tau, cos2)
        products = (np.asarray(r1.te) * r2.te) ** S + (np.asarray(r1.tm) * r2.tm) ** S
        return np.array([np.sum(weight * products * np.ones_like(xi)) / ((2.0 * S) ** 2 * S ** 2)])

    series = sum_series(term, quad.rel_tol_leading, quad.s_max, label="reduced PFA s-series")
    prefactor = -CONSTANTS.hbar_c / (4.0 * math.pi * geom.R * geom.e ** 2)
    value = float(series.value[0])
    tail = float(series.tail[0])
    return PfaResult(
        prefactor * value,
        Diagnostics(
            s_reached=series.terms,
            tail_estimate=prefactor * tail,
            phi_nodes=grid.shape[0],
            t_nodes=grid.shape[1],
            error_estimate=abs(tail / value) if value else 0.0,
            notes={"route": Route.REDUCED_DOUBLE_INTEGRAL.value},
        ),
    )


def pfa_energy_details(
    model1: DielectricModel,
    model2: DielectricModel,
    geom: Geometry,
    quad: Optional[QuadratureSpec] = None,
    route: Route = Route.LIFSHITZ_INTEGRAL,
) -> PfaResult:
    """PFA energy with the quadrature diagnostics of the chosen route."""
    quad = quad or QuadratureSpec()
    if Route(route) == Route.LIFSHITZ_INTEGRAL:
        return _energy_lifshitz_route(model1, model2, geom, quad)
    return _energy_reduced_route(model1, model2, geom, quad)


def pfa_force_details(model1, model2, geom: Geometry, quad: Optional[QuadratureSpec] = None) -> PfaResult:
    moments = _plate_moments(model1, model2, geom.d, quad or QuadratureSpec())
    scale = 2.0 * math.pi * geom.R
    return PfaResult(scale * moments.density, _moments_diagnostics(moments, 0, scale, "plate density"))


def pfa_gradient_details(model1, model2, geom: Geometry, quad: Optional[QuadratureSpec] = None) -> PfaResult:
    moments = _plate_moments(model1, model2, geom.d, quad or QuadratureSpec())
    scale = 2.0 * math.pi * geom.R
    return PfaResult(scale * moments.derivative, _moments_diagnostics(moments, 1, scale, "plate derivative"))


def pfa_energy(
    model1: DielectricModel,
    model2: DielectricModel,
    geom: Geometry,
    quad: Optional[QuadratureSpec] = None,
    route: Route = Route.LIFSHITZ_INTEGRAL,
) -> float:
    return pfa_energy_details(model1, model2, geom, quad, route).value


def pfa_force(model1, model2, geom: Geometry, quad: Optional[QuadratureSpec] = None) -> float:
    """-dE_PFA/dd = 2 pi R E_par(d)."""
    return pfa_force_details(model1, model2, geom, quad).value


def pfa_gradient(model1, model2, geom: Geometry, quad: Optional[QuadratureSpec] = None) -> float:
    """dF_PFA/dd = 2 pi R dE_par/dd, positive."""
    return pfa_gradient_details(model1, model2, geom, quad).value
