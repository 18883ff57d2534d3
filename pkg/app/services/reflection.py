"""Closed-form reflection coefficient families in the reduced variable tau.

All functions accept scalar or array eps/tau (broadcast together) or the
PERFECT_CONDUCTOR marker in place of eps, in which case the analytic
eps -> infinity limits are returned.

Notation: Delta = eps (1 - tau^2) + tau^2.
"""
from typing import NamedTuple

import numpy as np

from app.core.errors import DomainError
from app.services.dielectric import is_perfect_conductor


class PolarizationPair(NamedTuple):
    te: object
    tm: object


class PlateFactors(NamedTuple):
    t0: PolarizationPair
    k1: PolarizationPair
    k2: PolarizationPair


class SphereFactors(NamedTuple):
    t0: PolarizationPair
    w1: PolarizationPair
    w2: PolarizationPair
    y2: PolarizationPair


class RoundTripFactors(NamedTuple):
    t0: PolarizationPair
    t0_plate: PolarizationPair
    k1: PolarizationPair
    k2: PolarizationPair
    w1: PolarizationPair
    w2: PolarizationPair
    y2: PolarizationPair


def _check_angle(tau, cos2=None):
    """tau and 1 - tau^2; callers near tau = 1 pass cos2 to keep its precision."""
    tau = np.asarray(tau, dtype=float)
    if cos2 is None:
        if np.any(tau <= 0) or np.any(tau >= 1):
            raise DomainError("tau must lie strictly inside (0, 1)")
        return tau, (1.0 - tau) * (1.0 + tau)
    cos2 = np.asarray(cos2, dtype=float)
    if np.any(tau <= 0) or np.any(tau > 1) or np.any(cos2 <= 0):
        raise DomainError("tau must lie strictly inside (0, 1)")
    return tau, cos2


def _check_eps(eps) -> np.ndarray:
    eps = np.asarray(eps, dtype=float)
    if np.any(eps < 1):
        raise DomainError("eps must be >= 1 on the imaginary axis")
    return eps


def _maybe_scalar(value):
    value = np.asarray(value)
    return float(value) if value.ndim == 0 else value


def _pair(te, tm) -> PolarizationPair:
    return PolarizationPair(_maybe_scalar(te), _maybe_scalar(tm))


def _reflection_t0(eps, tau, cos2):
    """(sqrt(D) - 1)/(sqrt(D) + 1) and (eps - sqrt(D))/(eps + sqrt(D))."""
    delta = eps * cos2 + tau ** 2
    root = np.sqrt(delta)
    # numerators rewritten without cancellation: D - 1 = (eps - 1)(1 - tau^2),
    # eps^2 - D = (eps - 1)(eps + tau^2)
    te = (eps - 1.0) * cos2 / (root + 1.0) ** 2
    tm = (eps - 1.0) * (eps + tau ** 2) / (eps + root) ** 2
    return te, tm


def fresnel_reduced(eps, tau, cos2=None) -> PolarizationPair:
    """Plate Fresnel coefficients after q = l/(R tau), kappa = l sqrt(1-tau^2)/(R tau)."""
    tau, cos2 = _check_angle(tau, cos2)
    if is_perfect_conductor(eps):
        ones = np.ones_like(tau)
        return _pair(ones, ones)
    te, tm = _reflection_t0(_check_eps(eps), tau, cos2)
    return _pair(te, tm)


def fresnel(eps, kappa, q) -> PolarizationPair:
    """Fresnel coefficients r^TE, r^TM for imaginary frequency c kappa and momentum q."""
    kappa = np.asarray(kappa, dtype=float)
    q = np.asarray(q, dtype=float)
    if np.any(kappa < 0) or np.any(q < kappa):
        raise DomainError("need q >= kappa >= 0")
    if np.any(q == 0):
        raise DomainError("q and kappa must not both vanish")
    if is_perfect_conductor(eps):
        ones = np.ones(np.broadcast(kappa, q).shape)
        return _pair(ones, ones)
    eps = _check_eps(eps)
    excess = (eps - 1.0) * kappa ** 2
    root = np.sqrt(excess + q ** 2)
    te = excess / (root + q) ** 2
    tm = (eps * q - root) / (eps * q + root)
    return _pair(te, tm)


def plate_factors(eps2, tau, cos2=None) -> PlateFactors:
    """T~0, K1, K2 of the plate: Taylor data of T~(theta0 + theta) with tau = tanh(theta0)."""
    tau, cos2 = _check_angle(tau, cos2)
    if is_perfect_conductor(eps2):
        ones, zeros = np.ones_like(tau), np.zeros_like(tau)
        return PlateFactors(_pair(ones, ones), _pair(zeros, zeros), _pair(zeros, zeros))

    eps = _check_eps(eps2)
    t0_te, t0_tm = _reflection_t0(eps, tau, cos2)
    tau2 = tau ** 2
    delta = eps * cos2 + tau2
    root = np.sqrt(delta)

    k1_te = -2.0 * tau / root
    k2_te = -eps * cos2 / delta ** 1.5 + 2.0 * tau2 / delta
    k1_tm = 2.0 * eps * tau * cos2 / (root * (eps + tau2))
    k2_tm = (
        eps ** 2 * cos2 ** 2 / (delta ** 1.5 * (eps + tau2))
        - tau2 * (eps ** 2 * cos2 + eps + 1.0) / (delta * (eps + tau2))
        + tau2 * (eps * root + 1.0) ** 2 / (delta * (root + eps) ** 2)
    )
    return PlateFactors(_pair(t0_te, t0_tm), _pair(k1_te, k1_tm), _pair(k2_te, k2_tm))


def sphere_factors(eps1, tau, cos2=None) -> SphereFactors:
    """T0, W1, W2, Y2 of the sphere from the large-order expansion of its Mie coefficients."""
    tau, cos2 = _check_angle(tau, cos2)
    tau2 = tau ** 2
    if is_perfect_conductor(eps1):
        ones, zeros = np.ones_like(tau), np.zeros_like(tau)
        return SphereFactors(
            _pair(ones, ones),
            _pair(zeros, zeros),
            _pair(zeros, zeros),
            _pair((3.0 - 5.0 * tau2) / 12.0, (7.0 * tau2 + 3.0) / 12.0),
        )

    eps = _check_eps(eps1)
    t0_te, t0_tm = _reflection_t0(eps, tau, cos2)
    tau4 = tau2 ** 2
    delta = eps * cos2 + tau2
    root = np.sqrt(delta)
    poly = 8.0 * tau2 + 4.0 * tau4 + 4.0 * eps * cos2 * (1.0 + tau2)

    w1_te = -4.0 * tau / root
    w2_te = (
        poly / delta ** 1.5
        + 4.0 * cos2 ** 2 * (eps + root) ** 2 / (tau2 * delta * (root + 1.0) ** 2)
        - 4.0 * cos2 * (tau2 + eps) / (tau2 * delta)
    )
    y2_te = -tau / root - (
        eps * cos2 * (5.0 * tau2 - 3.0) + 9.0 * tau2 + 5.0 * tau4
    ) / (12.0 * delta)

    w1_tm = 4.0 * eps * tau * cos2 / (root * (tau2 + eps))
    w2_tm = (
        -eps * cos2 * poly / ((eps + tau2) * delta ** 1.5)
        + 4.0 * cos2 ** 2 * eps ** 2 * (1.0 + root) ** 2 / (tau2 * delta * (root + eps) ** 2)
        - 4.0 * eps ** 2 * cos2 ** 3 / (tau2 * (tau2 + eps) * delta)
    )
    tau6 = tau4 * tau2
    y2_tm = eps * cos2 * tau / ((eps + tau2) * root) - (
        -eps ** 2 * cos2 * (7.0 * tau2 + 3.0)
        - 5.0 * eps * tau6
        + 13.0 * eps * tau4
        - 18.0 * eps * tau2
        + 5.0 * tau6
        - 3.0 * tau4
    ) / (12.0 * (eps + tau2) * delta)

    return SphereFactors(
        _pair(t0_te, t0_tm),
        _pair(w1_te, w1_tm),
        _pair(w2_te, w2_tm),
        _pair(y2_te, y2_tm),
    )


def round_trip_factors(eps1, eps2, tau, cos2=None) -> RoundTripFactors:
    sphere = sphere_factors(eps1, tau, cos2)
    plate = plate_factors(eps2, tau, cos2)
    return RoundTripFactors(
        t0=sphere.t0,
        t0_plate=plate.t0,
        k1=plate.k1,
        k2=plate.k2,
        w1=sphere.w1,
        w2=sphere.w2,
        y2=sphere.y2,
    )
