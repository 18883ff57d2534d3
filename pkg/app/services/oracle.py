"""Exact sphere-plate energy from the truncated round-trip operator.

    E = (hbar c / (2 pi L)) int_0^inf dy sum_m' log det(1 - M_m(kappa = y/L))

with m = 0 counted once and m >= 1 twice. Each M_m is a dense matrix of 2x2
polarisation blocks indexed by l, l' in [max(1, m), l_max]:

    M_{l l'} = (pi/2) N_l N_l' diag(T_l) int_1^inf dx e^{-2 kappa L x} A(x),
    N_l = sqrt((2l+1)/(l(l+1)) (l-m)!/(l+m)!),

    A = [[a dp dp' - b mp mp',  a dp mp' - b mp dp'],
         [-a mp dp' + b dp mp', -a mp mp' + b dp dp']],

where dp = sinh(theta) dP^_l^m/dx, mp = m P^_l^m / sinh(theta), x = cosh(theta),
a = r_TE(x) and b = -r_TM(x) of the plate. The phases (-1)^m i^m carried by the
two Legendre functions combine to (-1)^m and cancel the printed (-1)^m, so
everything is real.

The matrix actually factorised is the similarity transform
|T|^{-1/2} M |T|^{1/2}, assembled from log-magnitudes so that large orders and
arguments stay representable; det(1 - M) is unchanged.
"""
import logging
import math
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
from scipy.linalg import lu_factor
from scipy.special import gammaln

from app.core.config import settings
from app.core.constants import CONSTANTS
from app.core.errors import AssemblyError, ConvergenceError, DomainError, PrecisionError
from app.schemas.geometry import Geometry
from app.schemas.material import DielectricModel
from app.schemas.quadrature import TruncationSpec
from app.services.dielectric import is_perfect_conductor, permittivity
from app.services.quadrature import gauss_laguerre, gauss_legendre
from app.services.reflection import PolarizationPair, fresnel
from app.services.special_functions import bessel_half_sequence, debye_bessel, legendre_log_sequence

logger = logging.getLogger(__name__)

WRONSKIAN_TOL = 1e-8
MAX_THETA_NODES = 160


class MieLogs(NamedTuple):
    """log|T| and sign per polarisation for l = 0..l_max (row 0 TE, row 1 TM)."""
    log_abs: np.ndarray
    sign: np.ndarray


def _is_vacuum(eps) -> bool:
    return not is_perfect_conductor(eps) and float(eps) == 1.0


def _mie_from_ratios(log_ik, g_out, h_out, g_in, eps) -> MieLogs:
    """T^TE = (I/K)(w) (g(nw) - g(w))/(g(nw) - h(w)), T^TM likewise with eps g(w), eps h(w)."""
    with np.errstate(divide="ignore"):
        if is_perfect_conductor(eps):
            te = np.ones_like(g_out)
            tm = g_out / h_out
        else:
            te = (g_in - g_out) / (g_in - h_out)
            tm = (g_in - eps * g_out) / (g_in - eps * h_out)
        log_abs = np.vstack([log_ik + np.log(np.abs(te)), log_ik + np.log(np.abs(tm))])
    return MieLogs(log_abs, np.vstack([np.sign(te), np.sign(tm)]))


def _mie_logs(l_max: int, omega: float, eps) -> MieLogs:
    if omega <= 0:
        raise DomainError(f"size parameter must be positive, got {omega}")
    outside = bessel_half_sequence(l_max, omega)
    residual = np.exp(outside.log_i + outside.log_k) * (outside.h - outside.g) + 1.0
    if np.max(np.abs(residual)) > WRONSKIAN_TOL:
        raise PrecisionError(
            f"Bessel combination lost precision at omega={omega:.6g} (residual {np.max(np.abs(residual)):.3g})"
        )
    log_ik = outside.log_i - outside.log_k + 2.0 * omega
    if is_perfect_conductor(eps):
        g_in = outside.g
    elif _is_vacuum(eps):
        g_in = outside.g
        eps = 1.0
    else:
        g_in = bessel_half_sequence(l_max, math.sqrt(eps) * omega).g
    return _mie_from_ratios(log_ik, outside.g, outside.h, g_in, eps)


def _pair_from_logs(logs: MieLogs, l: int) -> PolarizationPair:
    values = logs.sign[:, l] * np.exp(logs.log_abs[:, l])
    return PolarizationPair(float(values[0]), float(values[1]))


def mie_coefficients(l: int, omega: float, eps1) -> PolarizationPair:
    """Sphere scattering coefficients (TE > 0, TM < 0) at size parameter omega = kappa R."""
    if l < 1:
        raise DomainError("multipole order l must be >= 1")
    if not is_perfect_conductor(eps1) and eps1 < 1:
        raise DomainError("eps must be >= 1 on the imaginary axis")
    return _pair_from_logs(_mie_logs(l, omega, eps1), l)


def debye_mie(l: int, omega: float, eps) -> PolarizationPair:
    """Mie coefficients from the first-order uniform large-order approximations."""
    if l < 1:
        raise DomainError("multipole order l must be >= 1")
    if omega <= 0:
        raise DomainError(f"size parameter must be positive, got {omega}")
    nu = l + 0.5
    out = debye_bessel(l, omega / nu)
    g_out = np.exp(out.log_i_combo - out.log_i)
    h_out = -np.exp(out.log_k_combo - out.log_k)
    log_ik = out.log_i - out.log_k
    if is_perfect_conductor(eps) or _is_vacuum(eps):
        g_in = g_out
    else:
        inside = debye_bessel(l, math.sqrt(eps) * omega / nu)
        g_in = np.exp(inside.log_i_combo - inside.log_i)
    logs = _mie_from_ratios(
        np.atleast_1d(log_ik), np.atleast_1d(g_out), np.atleast_1d(h_out), np.atleast_1d(g_in),
        1.0 if _is_vacuum(eps) else eps,
    )
    return _pair_from_logs(logs, 0)


def _plate_coefficients(eps2, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """a = r_TE and b = -r_TM of the plate at x = cosh(theta)."""
    if is_perfect_conductor(eps2):
        return np.ones_like(x), -np.ones_like(x)
    r = fresnel(eps2, 1.0, x)
    return np.asarray(r.te), -np.asarray(r.tm)


def theta_node_count(l_max: int, theta_nodes: int) -> int:
    return min(MAX_THETA_NODES, max(theta_nodes, l_max + 20))


class RoundTripBlock(NamedTuple):
    matrix: np.ndarray     # similarity-scaled, shape (2n, 2n), TE rows first
    log_abs_t: np.ndarray  # (2, n) log|T| for the l range
    l_min: int


def round_trip_block(
    m: int,
    kappa_l: float,
    omega: float,
    eps1,
    eps2,
    l_max: int,
    theta_nodes: int,
    mie: Optional[MieLogs] = None,
) -> RoundTripBlock:
    """Similarity-scaled round-trip matrix for azimuthal number m >= 0."""
    if m < 0 or m > l_max:
        raise DomainError(f"need 0 <= m <= l_max, got m={m}")
    if kappa_l <= 0:
        raise DomainError("kappa L must be positive")
    l_min = max(1, m)
    ls = np.arange(l_min, l_max + 1)
    n = ls.size
    mie = mie if mie is not None else _mie_logs(l_max, omega, eps1)
    log_t = mie.log_abs[:, l_min:]
    sign_t = mie.sign[:, l_min:]

    u, w = gauss_laguerre(theta_node_count(l_max, theta_nodes))
    x = 1.0 + u / (2.0 * kappa_l)
    a, b = _plate_coefficients(eps2, x)

    log_p, dp_ratio = legendre_log_sequence(l_max, m, x)
    log_p = log_p[l_min - m:]
    dp_ratio = dp_ratio[l_min - m:]
    log_sinh = 0.5 * np.log((x - 1.0) * (x + 1.0))
    with np.errstate(divide="ignore"):
        common = (
            0.5 * (np.log(2.0 * ls + 1.0) - np.log(ls * (ls + 1.0)) + gammaln(ls - m + 1.0) - gammaln(ls + m + 1.0))[:, None]
            + 0.5 * np.log(w)[None, :]
            + 0.5 * (math.log(0.5 * math.pi) - 2.0 * kappa_l - math.log(2.0 * kappa_l))
            + log_p
        )
        log_d = common + np.log(np.abs(dp_ratio))
        sign_d = np.sign(dp_ratio)
        log_mp = common + (math.log(m) - log_sinh)[None, :] if m > 0 else None

    def factors(pol: int):
        half = 0.5 * log_t[pol][:, None]
        d = sign_d * np.exp(log_d + half)
        mp = np.exp(log_mp + half) if log_mp is not None else np.zeros_like(d)
        return d, mp

    d_te, mp_te = factors(0)
    d_tm, mp_tm = factors(1)

    def weighted(left, weight, right):
        return (left * weight[None, :]) @ right.T

    te_te = weighted(d_te, a, d_te) - weighted(mp_te, b, mp_te)
    te_tm = weighted(d_te, a, mp_tm) - weighted(mp_te, b, d_tm)
    tm_te = -weighted(mp_tm, a, d_te) + weighted(d_tm, b, mp_te)
    tm_tm = -weighted(mp_tm, a, mp_tm) + weighted(d_tm, b, d_tm)
    matrix = np.block([
        [sign_t[0][:, None] * te_te, sign_t[0][:, None] * te_tm],
        [sign_t[1][:, None] * tm_te, sign_t[1][:, None] * tm_tm],
    ])
    if not np.all(np.isfinite(matrix)):
        raise PrecisionError(f"non-finite round-trip entries at m={m}, kappa L={kappa_l:.6g}")
    return RoundTripBlock(matrix, log_t, l_min)


def matrix_element(
    l: int,
    lp: int,
    m: int,
    kappa_l: float,
    eps1,
    eps2,
    omega: float,
    theta_nodes: Optional[int] = None,
) -> np.ndarray:
    """Unscaled 2x2 block M_{l l'} (rows TE, TM) for azimuthal number m."""
    mm = abs(m)
    if min(l, lp) < max(1, mm):
        raise DomainError(f"need l, l' >= max(1, |m|), got l={l}, l'={lp}, m={m}")
    if _is_vacuum(eps1) or _is_vacuum(eps2):
        return np.zeros((2, 2))
    theta_nodes = theta_nodes or settings.ORACLE_THETA_NODES
    l_max = max(l, lp)
    block = round_trip_block(mm, kappa_l, omega, eps1, eps2, l_max, theta_nodes)
    n = l_max - block.l_min + 1
    i, j = l - block.l_min, lp - block.l_min
    out = np.empty((2, 2))
    for p in range(2):
        for q in range(2):
            scale = math.exp(0.5 * (block.log_abs_t[p, i] - block.log_abs_t[q, j]))
            out[p, q] = block.matrix[p * n + i, q * n + j] * scale
    if m < 0:
        # mp changes sign with m; only the polarisation-mixing entries feel it
        out[0, 1] = -out[0, 1]
        out[1, 0] = -out[1, 0]
    return out


def log_det_one_minus(matrix: np.ndarray) -> float:
    lu, piv = lu_factor(np.eye(matrix.shape[0]) - matrix)
    diag = np.diag(lu)
    swaps = np.count_nonzero(piv != np.arange(piv.size))
    sign = np.prod(np.sign(diag)) * (-1) ** swaps
    if sign <= 0:
        raise AssemblyError("det(1 - M) <= 0: round-trip operator is not a contraction")
    return float(np.sum(np.log(np.abs(diag))))


def _eps_at(model: DielectricModel, xi: float):
    return permittivity(model, xi)


def _frequency_integrand(model1, model2, geom: Geometry, y: float, l_max: int, theta_nodes: int) -> float:
    """sum over m of log det(1 - M_m) at kappa L = y."""
    xi = CONSTANTS.c * y / geom.L
    eps1 = _eps_at(model1, xi)
    eps2 = _eps_at(model2, xi)
    omega = y * geom.R / geom.L
    mie = _mie_logs(l_max, omega, eps1)
    total = 0.0
    for m in range(l_max + 1):
        block = round_trip_block(m, y, omega, eps1, eps2, l_max, theta_nodes, mie=mie)
        contribution = log_det_one_minus(block.matrix)
        total += contribution if m == 0 else 2.0 * contribution
        if m >= 2 and abs(contribution) <= 1e-15 * abs(total):
            break
    return total


class OracleResult(NamedTuple):
    value: float
    l_max: int
    xi_nodes: int
    error_estimate: float


def _energy_with_nodes(model1, model2, geom, l_max, theta_nodes, n_nodes) -> float:
    u, w = gauss_legendre(n_nodes, 0.0, 1.0)
    y = u / (1.0 - u)
    jacobian = 1.0 / (1.0 - u) ** 2
    values = np.array([
        _frequency_integrand(model1, model2, geom, yi, l_max, theta_nodes) for yi in y
    ])
    return CONSTANTS.hbar_c / (2.0 * math.pi * geom.L) * float(np.dot(w, values * jacobian))


def exact_energy_details(
    model1: DielectricModel,
    model2: DielectricModel,
    geom: Geometry,
    trunc: Optional[TruncationSpec] = None,
) -> OracleResult:
    trunc = trunc or TruncationSpec()
    l_max = trunc.resolved_l_max(geom.e)
    if model1.is_vacuum or model2.is_vacuum:
        return OracleResult(0.0, l_max, 0, 0.0)
    if geom.e < 0.05:
        logger.warning("d/R = %.3g is below the range where l_max = %d is expected to converge", geom.e, l_max)

    n_nodes = trunc.xi_nodes
    value = _energy_with_nodes(model1, model2, geom, l_max, trunc.theta_nodes, n_nodes)
    for _ in range(trunc.max_doublings):
        n_nodes *= 2
        refined = _energy_with_nodes(model1, model2, geom, l_max, trunc.theta_nodes, n_nodes)
        change = abs(refined - value) / max(abs(refined), np.finfo(float).tiny)
        value = refined
        logger.debug("xi nodes %d: E = %.12g J (change %.3g)", n_nodes, value, change)
        if change <= trunc.tolerance:
            return OracleResult(value, l_max, n_nodes, change * abs(value))
    if trunc.max_doublings == 0:
        return OracleResult(value, l_max, n_nodes, float("nan"))
    raise ConvergenceError(
        "frequency quadrature of the exact energy did not settle",
        estimate=value,
        error_bound=change * abs(value),
        diagnostics={"xi_nodes": n_nodes, "l_max": l_max},
    )


def exact_energy(model1, model2, geom: Geometry, trunc: Optional[TruncationSpec] = None) -> float:
    """Exact interaction energy in J (negative) at the given truncation."""
    return exact_energy_details(model1, model2, geom, trunc).value


class ConvergedEnergy(NamedTuple):
    value: float
    l_max: int
    trace: List[Tuple[int, float]]


def exact_energy_converged(
    model1,
    model2,
    geom: Geometry,
    trunc: Optional[TruncationSpec] = None,
    step: int = 10,
    max_rounds: int = 4,
) -> ConvergedEnergy:
    """Raise l_max by `step` until the energy changes by less than the tolerance."""
    trunc = trunc or TruncationSpec()
    l_max = trunc.resolved_l_max(geom.e)
    trace: List[Tuple[int, float]] = []
    for _ in range(max_rounds):
        spec = trunc.model_copy(update={"l_max": l_max})
        value = exact_energy(model1, model2, geom, spec)
        trace.append((l_max, value))
        if len(trace) >= 2:
            previous = trace[-2][1]
            if value == 0.0 or abs(value - previous) <= trunc.tolerance * abs(value):
                return ConvergedEnergy(value, l_max, trace)
        l_max += step
    raise ConvergenceError(
        "exact energy not converged in l_max",
        estimate=trace[-1][1],
        error_bound=abs(trace[-1][1] - trace[-2][1]) if len(trace) > 1 else None,
        diagnostics={"l_max_trace": [l for l, _ in trace], "values": [v for _, v in trace]},
    )


def casimir_polder_pc(geom: Geometry) -> float:
    """Large-separation energy of a perfectly conducting sphere above a perfect mirror."""
    return -9.0 * CONSTANTS.hbar_c * geom.R ** 3 / (16.0 * math.pi * geom.L ** 4)
