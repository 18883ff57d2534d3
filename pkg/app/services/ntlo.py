"""Small-separation expansion of the sphere-plate interaction.

Leading (PFA) and next-to-leading terms of the energy, force and force
gradient as (tau, t) double integrals summed over the round-trip index s:

    Q^0 = P_k / e^{k+1} sum_s S^{k-3} int dtau tau/sqrt(1-tau^2) int dt t^k e^{-2tS}
                 sum_* [T0* T~0*]^S
    Q^1 = same with  sum_* [T0* T~0*]^S (A + C* + D*) + X B  inside,

with S = s + 1, l = t tau / e, k = 1, 2, 3 for energy, force, gradient and
P_k = -hbar c/(4 pi R), -hbar c/(2 pi R^2), +hbar c/(pi R^3).

tau = sin(phi) takes Gauss-Legendre nodes on (0, pi/2); t = u/(2S) takes
Gauss-Laguerre nodes in u, which turns the exponential into the weight.
A Drude medium switches to log-graded panels in both directions.
"""
import logging
import math
from typing import Dict, NamedTuple, Optional, Tuple

import numpy as np

from app.core.constants import CONSTANTS
from app.core.errors import ConvergenceError, DomainError
from app.models.quantity import Kind
from app.schemas.geometry import Geometry
from app.schemas.material import DielectricModel
from app.schemas.quadrature import QuadratureSpec
from app.schemas.result import Diagnostics, ExpansionResult
from app.services.dielectric import has_damping_scale, permittivity_reduced, reduced_groups
from app.services.quadrature import ReducedGrid, reduced_grid, sum_series
from app.services.reflection import PolarizationPair, fresnel_reduced, round_trip_factors

logger = logging.getLogger(__name__)

KINDS = (Kind.ENERGY, Kind.FORCE, Kind.GRADIENT)

# power of t in the integrand and of S in front of each s-term
_T_POWER = {Kind.ENERGY: 1, Kind.FORCE: 2, Kind.GRADIENT: 3}
_S_POWER = {Kind.ENERGY: -2, Kind.FORCE: -1, Kind.GRADIENT: 0}

EQUAL_PRODUCT_TOL = 1e-9


def pc_reference(kind: Kind, geom: Geometry) -> float:
    """PFA value for two perfect conductors."""
    hc = CONSTANTS.hbar_c
    if kind == Kind.ENERGY:
        return -math.pi ** 3 * hc * geom.R / (720.0 * geom.d ** 2)
    if kind == Kind.FORCE:
        return -math.pi ** 3 * hc * geom.R / (360.0 * geom.d ** 3)
    return math.pi ** 3 * hc * geom.R / (120.0 * geom.d ** 4)


def pc_theta(kind: Kind) -> float:
    if kind == Kind.ENERGY:
        return 1.0 / 3.0 - 20.0 / math.pi ** 2
    if kind == Kind.FORCE:
        return 1.0 / 6.0 - 10.0 / math.pi ** 2
    return 1.0 / 9.0 - 20.0 / (3.0 * math.pi ** 2)


def prefactor(kind: Kind, geom: Geometry) -> float:
    hc = CONSTANTS.hbar_c
    e = geom.e
    if kind == Kind.ENERGY:
        return -hc / (4.0 * math.pi * geom.R * e ** 2)
    if kind == Kind.FORCE:
        return -hc / (2.0 * math.pi * geom.R ** 2 * e ** 3)
    return hc / (math.pi * geom.R ** 3 * e ** 4)


class ScriptCoefficients(NamedTuple):
    a_term: object
    b_term: object
    c_v: object
    c_j: object
    d_vv: object
    d_jj: object
    d_vj: object
    d_v: object
    d_j: object
    s: int
    tau: object
    l: object
    e: float


def script_coefficients(kind: Kind, s: int, tau, l, e: float) -> ScriptCoefficients:
    """Polynomial coefficients of the next-to-leading integrand at (s, tau, l, e)."""
    if s < 0:
        raise DomainError("series index s must be non-negative")
    tau = np.asarray(tau, dtype=float)
    l = np.asarray(l, dtype=float)
    S = s + 1.0
    tau2 = tau ** 2
    cubic = S ** 3 + 2.0 * S
    common_a = e ** 2 * l * tau * cubic / 3.0
    common_c = -e * tau * cubic / 3.0
    common_cj = -e * tau * (S ** 3 - S) / 6.0

    if kind == Kind.ENERGY:
        a_term = (
            common_a
            + e / 3.0 * ((tau2 - 2.0) * S ** 2 - 3.0 * tau * S + 2.0 * tau2 - 1.0)
            + (tau2 ** 2 + tau2 - 12.0) / (12.0 * l * tau) * S
            + (1.0 + tau) * (1.0 - tau2) / (2.0 * l * tau)
            - tau * (1.0 - tau2) / (3.0 * l) / S
        )
        c_v = common_c + (1.0 - tau2) / (6.0 * l) * S ** 2 + tau / (2.0 * l) * S + (1.0 - 4.0 * tau2) / (12.0 * l)
        c_j = common_cj + (S ** 2 - 1.0) / (12.0 * l)
    elif kind == Kind.FORCE:
        a_term = (
            common_a
            - e / 3.0 * (2.0 * S ** 2 + 3.0 * tau * S + 1.0)
            + (-tau2 ** 2 + 5.0 * tau2 - 12.0) / (12.0 * l * tau) * S
            + (1.0 + tau - tau2) / (2.0 * l * tau)
            - tau / (6.0 * l) / S
        )
        c_v = common_c + S ** 2 / (6.0 * l) + tau / (2.0 * l) * S + 1.0 / (12.0 * l)
        c_j = common_cj + (1.0 + tau2) / (12.0 * l) * (S ** 2 - 1.0)
    elif kind == Kind.GRADIENT:
        a_term = (
            common_a
            - e / 3.0 * ((2.0 + tau2) * S ** 2 + 3.0 * tau * S + 1.0 + 2.0 * tau2)
            + (-tau2 ** 2 + 9.0 * tau2 - 12.0) / (12.0 * l * tau) * S
            + (1.0 + tau - tau2 + tau2 * tau) / (2.0 * l * tau)
        )
        c_v = common_c + (1.0 + tau2) / (6.0 * l) * S ** 2 + tau / (2.0 * l) * S + (1.0 + 4.0 * tau2) / (12.0 * l)
        c_j = common_cj + (1.0 + 2.0 * tau2) / (12.0 * l) * (S ** 2 - 1.0)
    else:
        raise DomainError(f"unknown kind {kind!r}")

    return ScriptCoefficients(
        a_term=a_term,
        b_term=(1.0 - tau2) / (2.0 * l * tau * S),
        c_v=c_v,
        c_j=c_j,
        d_vv=tau / (12.0 * l) * (S ** 3 - 2.0 * S ** 2 + 2.0 * S - 1.0),
        d_jj=tau / (48.0 * l) * (S ** 3 - 2.0 * S ** 2 - S + 2.0),
        d_vj=tau / (12.0 * l) * (S ** 3 - S),
        d_v=tau / (6.0 * l) * (2.0 * S ** 2 - 3.0 * S + 1.0),
        d_j=tau / (12.0 * l) * (S ** 2 - 1.0),
        s=s,
        tau=tau,
        l=l,
        e=e,
    )


def _power_quotient(p1, p2, n: int):
    """(p1^n - p2^n)/(p1 - p2) for p1, p2 >= 0, replaced by n p^{n-1} at equal arguments."""
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    if n == 0:
        return np.zeros(np.broadcast(p1, p2).shape)
    hi = np.maximum(p1, p2)
    lo = np.minimum(p1, p2)
    with np.errstate(divide="ignore", invalid="ignore"):
        # hi^{n-1} (r^n - 1)/(r - 1) with r = lo/hi, through expm1/log1p
        delta = np.where(hi > 0, (lo - hi) / hi, 0.0)
        ratio = np.where(
            delta > -1.0,
            np.expm1(n * np.log1p(delta)) / np.where(delta == 0.0, 1.0, delta),
            1.0,
        )
        quotient = hi ** (n - 1) * ratio
    near = np.abs(p1 - p2) < EQUAL_PRODUCT_TOL * hi
    mean = 0.5 * (p1 + p2)
    limit = n * mean ** (n - 1)
    return np.where(near, limit, np.where(hi > 0, quotient, 0.0))


def x_factor_from_products(p_te, p_tm, cross, s: int):
    """Cross-polarisation factor X from the TE/TM round-trip products.

    cross = T0^TE T~0^TM + T0^TM T~0^TE.
    """
    if s < 0:
        raise DomainError("series index s must be non-negative")
    S = s + 1
    p_te = np.asarray(p_te, dtype=float)
    p_tm = np.asarray(p_tm, dtype=float)
    value = S * (
        cross * _power_quotient(p_te, p_tm, S)
        + 2.0 * p_te * p_tm * _power_quotient(p_te, p_tm, s)
    )
    return float(value) if np.ndim(value) == 0 else value


def x_factor(t0: PolarizationPair, t0_plate: PolarizationPair, s: int):
    p_te = np.asarray(t0.te) * np.asarray(t0_plate.te)
    p_tm = np.asarray(t0.tm) * np.asarray(t0_plate.tm)
    cross = np.asarray(t0.te) * np.asarray(t0_plate.tm) + np.asarray(t0.tm) * np.asarray(t0_plate.te)
    return x_factor_from_products(p_te, p_tm, cross, s)


def leading_integrand(s: int, tau, t, eps1, eps2):
    """Integrand of the leading term in (tau, t) before the s-dependent prefactor."""
    if s < 0:
        raise DomainError("series index s must be non-negative")
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("t must be positive")
    r1 = fresnel_reduced(eps1, tau)
    r2 = fresnel_reduced(eps2, tau)
    tau = np.asarray(tau, dtype=float)
    S = s + 1
    products = (np.asarray(r1.te) * r2.te) ** S + (np.asarray(r1.tm) * r2.tm) ** S
    value = tau / np.sqrt((1.0 - tau) * (1.0 + tau)) * t * np.exp(-2.0 * t * S) * products
    return float(value) if np.ndim(value) == 0 else value


def _grid(quad: QuadratureSpec, model1, model2) -> ReducedGrid:
    return reduced_grid(
        quad.phi_nodes,
        quad.t_nodes,
        graded=has_damping_scale(model1, model2),
        panels=quad.graded_panels,
        panel_nodes=quad.panel_nodes,
    )


def _series_terms(model1, model2, geom: Geometry, grid: ReducedGrid):
    """Per-s terms [E0, F0, G0, E1, F1, G1] without the geometric prefactors."""
    groups = reduced_groups(model1, model2, geom.R, geom.d)
    e = geom.e
    tau = grid.tau
    vacuum = model1.is_vacuum or model2.is_vacuum

    def term(s: int) -> np.ndarray:
        if vacuum:
            return np.zeros(6)
        S = s + 1
        t = grid.u / (2.0 * S)
        eps1 = permittivity_reduced(model1, t, tau, groups, medium=0, cos_tau=grid.cos_tau)
        eps2 = permittivity_reduced(model2, t, tau, groups, medium=1, cos_tau=grid.cos_tau)
        f = round_trip_factors(eps1, eps2, tau, grid.cos_tau ** 2)
        pow_te = (np.asarray(f.t0.te) * f.t0_plate.te) ** S
        pow_tm = (np.asarray(f.t0.tm) * f.t0_plate.tm) ** S
        x = x_factor(f.t0, f.t0_plate, s)
        l = t * tau / e

        out = np.empty(6)
        for i, kind in enumerate(KINDS):
            k = _T_POWER[kind]
            weight = grid.phi_weight * grid.u_weight * grid.u ** k / (2.0 * S) ** (k + 1) * float(S) ** _S_POWER[kind]
            c = script_coefficients(kind, s, tau, l, e)
            bracket = x * c.b_term
            for pol, power in (("te", pow_te), ("tm", pow_tm)):
                k1, k2 = getattr(f.k1, pol), getattr(f.k2, pol)
                w1, w2 = getattr(f.w1, pol), getattr(f.w2, pol)
                d_star = (
                    c.d_vv * k1 ** 2
                    + c.d_vj * k1 * w1
                    + c.d_jj * w1 ** 2
                    + (S * tau / (2.0 * l) + c.d_v) * k2
                    + c.d_j * w2
                    + S * tau / l * getattr(f.y2, pol)
                )
                bracket = bracket + power * (c.a_term + c.c_v * k1 + c.c_j * w1 + d_star)
            out[i] = np.sum(weight * (pow_te + pow_tm))
            out[i + 3] = np.sum(weight * bracket)
        return out

    return term


class _Sums(NamedTuple):
    leading: Dict[Kind, float]
    ntlo: Dict[Kind, float]
    terms: int
    tail: np.ndarray
    nodes: Tuple[int, int]


def _expansion_sums(model1, model2, geom: Geometry, quad: QuadratureSpec) -> _Sums:
    rel_tol = [quad.rel_tol_leading] * 3 + [quad.rel_tol_ntlo] * 3
    grid = _grid(quad, model1, model2)
    series = sum_series(_series_terms(model1, model2, geom, grid), rel_tol, quad.s_max, label="asymptotic s-series")
    leading = {kind: prefactor(kind, geom) * series.value[i] for i, kind in enumerate(KINDS)}
    ntlo = {kind: prefactor(kind, geom) * series.value[i + 3] for i, kind in enumerate(KINDS)}
    return _Sums(leading, ntlo, series.terms, series.tail, grid.shape)


def _relative_change(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0.0 else abs(a - b) / scale


def compute_all(
    model1: DielectricModel,
    model2: DielectricModel,
    geom: Geometry,
    quad: Optional[QuadratureSpec] = None,
) -> Dict[Kind, ExpansionResult]:
    """Energy, force and gradient expansions from a single pass over the grid."""
    quad = quad or QuadratureSpec()
    base = _expansion_sums(model1, model2, geom, quad)
    errors = {kind: (0.0, 0.0) for kind in KINDS}
    if quad.refine:
        fine_quad = quad.refined()
        fine = _expansion_sums(model1, model2, geom, fine_quad)
        for kind in KINDS:
            errors[kind] = (
                _relative_change(base.leading[kind], fine.leading[kind]),
                _relative_change(base.ntlo[kind], fine.ntlo[kind]),
            )
        failing = [
            kind.value for kind in KINDS
            if errors[kind][0] > quad.rel_tol_leading or errors[kind][1] > quad.rel_tol_ntlo
        ]
        if failing:
            logger.warning("node refinement moved %s beyond tolerance: %s", failing, errors)
            kind = Kind(failing[0])
            raise ConvergenceError(
                f"refining the quadrature changed the {failing[0]} beyond tolerance",
                estimate=fine.leading[kind] + fine.ntlo[kind],
                error_bound=max(errors[kind]) * abs(fine.leading[kind]),
                diagnostics={
                    "s_reached": fine.terms,
                    "phi_nodes": fine.nodes[0],
                    "t_nodes": fine.nodes[1],
                    "relative_changes": {k.value: errors[k] for k in KINDS},
                },
            )

    results = {}
    for i, kind in enumerate(KINDS):
        leading = base.leading[kind]
        ntlo = base.ntlo[kind]
        reference = pc_reference(kind, geom)
        theta = (ntlo / leading) / geom.e if leading != 0.0 else 0.0
        results[kind] = ExpansionResult(
            kind=kind,
            leading=leading,
            ntlo=ntlo,
            theta=theta,
            normalized_leading=leading / reference,
            normalized_sum=(leading + ntlo) / reference,
            diagnostics=Diagnostics(
                s_reached=base.terms,
                tail_estimate=float(prefactor(kind, geom) * base.tail[i + 3]),
                phi_nodes=base.nodes[0],
                t_nodes=base.nodes[1],
                error_estimate=max(errors[kind]),
            ),
        )
    logger.debug("expansion at d=%.6g m, R=%.6g m done after %d s-terms", geom.d, geom.R, base.terms)
    return results


def compute(
    kind: Kind,
    model1: DielectricModel,
    model2: DielectricModel,
    geom: Geometry,
    quad: Optional[QuadratureSpec] = None,
) -> ExpansionResult:
    return compute_all(model1, model2, geom, quad)[Kind(kind)]


def theta_ratios(model1, model2, geom: Geometry, quad: Optional[QuadratureSpec] = None) -> Dict[str, float]:
    results = compute_all(model1, model2, geom, quad)
    return {
        "theta_E": results[Kind.ENERGY].theta,
        "theta_F": results[Kind.FORCE].theta,
        "theta_G": results[Kind.GRADIENT].theta,
    }
