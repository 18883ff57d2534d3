"""Half-integer-order modified Bessel functions, associated Legendre functions
on (1, inf) and the uniform large-order (Debye) approximations.

The sequences are produced in log-magnitude form from ratio recurrences so
that orders up to a few hundred and arguments up to many thousands stay
representable:

  q_l = I_{l+1/2}/I_{l-1/2}   backward (Miller) recurrence, minimal solution
  p_l = K_{l+1/2}/K_{l-1/2}   forward recurrence, dominant solution

and the combinations (1/2) f + x f' are returned as logarithmic derivatives
g = (I/2 + x I')/I = x/q_l - l and h = (K/2 + x K')/K = -x/p_l - l.
"""
import logging
import math
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln

from app.core.errors import DomainError, PrecisionError

logger = logging.getLogger(__name__)

OVERFLOW_ARGUMENT = 700.0


class BesselPair(NamedTuple):
    order: float
    x: float
    i_val: float
    k_val: float
    i_combo: float
    k_combo: float
    scaled: bool


class BesselLogSequence(NamedTuple):
    """Orders l + 1/2 for l = 0..l_max at one argument x.

    log_i = log(e^{-x} I), log_k = log(e^{x} K); g and h are the combo ratios.
    """
    x: float
    log_i: np.ndarray
    log_k: np.ndarray
    g: np.ndarray
    h: np.ndarray


def miller_start(l_max: int, x: float) -> int:
    return l_max + max(20, math.ceil(math.sqrt(40.0 * x)))


def bessel_half_sequence(l_max: int, x: float) -> BesselLogSequence:
    if x <= 0:
        raise DomainError(f"Bessel argument must be positive, got {x}")
    if l_max < 0:
        raise DomainError("l_max must be non-negative")

    q = np.empty(l_max + 1)
    ratio = 0.0
    for l in range(miller_start(l_max, x), -1, -1):
        ratio = 1.0 / ((2 * l + 1) / x + ratio)
        if l <= l_max:
            q[l] = ratio

    p = np.empty(l_max + 1)
    p[0] = 1.0
    for l in range(l_max):
        p[l + 1] = 1.0 / p[l] + (2 * l + 1) / x

    log_i_half = 0.5 * math.log(2.0 / (math.pi * x)) + math.log(-math.expm1(-2.0 * x)) - math.log(2.0)
    log_k_half = 0.5 * math.log(math.pi / (2.0 * x))

    log_i = log_i_half + np.concatenate(([0.0], np.cumsum(np.log(q[1:]))))
    log_k = log_k_half + np.concatenate(([0.0], np.cumsum(np.log(p[1:]))))
    orders = np.arange(l_max + 1)
    g = x / q - orders
    h = -x / p - orders
    return BesselLogSequence(x=x, log_i=log_i, log_k=log_k, g=g, h=h)


def bessel_half(l: int, x: float, scaled: bool = False) -> BesselPair:
    """I, K and their (1/2) f + x f' combinations at order l + 1/2.

    With `scaled`, I and its combo are multiplied by e^{-x}, K and its combo by e^{x}.
    """
    if l < 0:
        raise DomainError("order index l must be non-negative")
    if not scaled and x > OVERFLOW_ARGUMENT:
        raise DomainError(f"unscaled Bessel values overflow for x={x}; pass scaled=True")
    seq = bessel_half_sequence(l, x)
    shift = 0.0 if scaled else x
    i_val = math.exp(seq.log_i[l] + shift)
    k_val = math.exp(seq.log_k[l] - shift)
    return BesselPair(
        order=l + 0.5,
        x=x,
        i_val=i_val,
        k_val=k_val,
        i_combo=i_val * seq.g[l],
        k_combo=k_val * seq.h[l],
        scaled=scaled,
    )


def wronskian_residual(pair: BesselPair) -> float:
    """I (K/2 + xK') - (I/2 + xI') K + 1, zero up to rounding."""
    residual = pair.i_val * pair.k_combo - pair.i_combo * pair.k_val + 1.0
    if not np.isfinite(residual):
        raise PrecisionError("non-finite Bessel combination")
    return residual


class LegendreValue(NamedTuple):
    p: object
    dp: object


def legendre_log_sequence(l_max: int, m: int, x):
    """log P^_l^m(x) and dp/p for l = m..l_max, with dp = sinh(theta) dP^/dx.

    P^_l^m(x) = (x^2 - 1)^{m/2} d^{l+m}/dx^{l+m} (x^2 - 1)^l / (2^l l!) is the
    real, positive form on x > 1. Rows run over l, columns over x.
    """
    if m < 0 or m > l_max:
        raise DomainError(f"need 0 <= m <= l, got m={m}, l={l_max}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x <= 1):
        raise DomainError("Legendre argument must exceed 1")

    sinh_theta = np.sqrt((x - 1.0) * (x + 1.0))
    log_sinh = np.log(sinh_theta)
    rows = l_max - m + 1
    log_p = np.empty((rows, x.size))
    dp_ratio = np.empty((rows, x.size))

    # P^_m^m = (2m - 1)!! (x^2 - 1)^{m/2}
    log_p[0] = gammaln(2 * m + 1) - m * math.log(2.0) - gammaln(m + 1) + m * log_sinh
    dp_ratio[0] = m * x / sinh_theta
    ratio = None
    for k in range(1, rows):
        l = m + k
        if k == 1:
            ratio = (2 * m + 1) * x
        else:
            ratio = ((2 * l - 1) * x - (l - 1 + m) / ratio) / (l - m)
        log_p[k] = log_p[k - 1] + np.log(ratio)
        # (x^2 - 1) P' = l x P_l - (l + m) P_{l-1}
        dp_ratio[k] = (l * x - (l + m) / ratio) / sinh_theta
    return log_p, dp_ratio


def assoc_legendre_real(l: int, m: int, x) -> LegendreValue:
    if m < 0 or m > l:
        raise DomainError(f"need 0 <= m <= l, got m={m}, l={l}")
    scalar = np.ndim(x) == 0
    log_p, dp_ratio = legendre_log_sequence(l, m, x)
    p = np.exp(log_p[-1])
    dp = p * dp_ratio[-1]
    if scalar:
        return LegendreValue(float(p[0]), float(dp[0]))
    return LegendreValue(p, dp)


class DebyeFactors(NamedTuple):
    eta: object
    tau_z: object
    u1: object
    m1: object
    log_i_amplitude: object = None
    log_k_amplitude: object = None


def debye_factors(z, nu=None) -> DebyeFactors:
    """eta(z), tau(z) = 1/sqrt(1+z^2) and the first correction polynomials u1, m1.

    With an order nu the logs of the leading amplitudes
    e^{nu eta} / (sqrt(2 pi nu) (1+z^2)^{1/4}) and sqrt(pi/(2 nu)) e^{-nu eta} / (1+z^2)^{1/4}
    are included.
    """
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise DomainError("Debye argument z must be positive")
    root = np.sqrt(1.0 + z ** 2)
    tau = 1.0 / root
    eta = root + np.log(z / (1.0 + root))
    u1 = tau / 8.0 - 5.0 * tau ** 3 / 24.0
    m1 = tau / 8.0 + 7.0 * tau ** 3 / 24.0
    log_i_amp = log_k_amp = None
    if nu is not None:
        if np.any(np.asarray(nu) <= 0):
            raise DomainError("Debye order must be positive")
        quarter = 0.5 * np.log(root)
        log_i_amp = nu * eta - 0.5 * np.log(2.0 * math.pi * nu) - quarter
        log_k_amp = -nu * eta + 0.5 * np.log(math.pi / (2.0 * nu)) - quarter
    if z.ndim == 0:
        return DebyeFactors(
            float(eta), float(tau), float(u1), float(m1),
            None if log_i_amp is None else float(log_i_amp),
            None if log_k_amp is None else float(log_k_amp),
        )
    return DebyeFactors(eta, tau, u1, m1, log_i_amp, log_k_amp)


class DebyeLogBessel(NamedTuple):
    """Debye approximations at order nu = l + 1/2 and argument nu z, as logs of magnitudes.

    The K combination is negative; its magnitude is stored.
    """
    log_i: object
    log_i_combo: object
    log_k: object
    log_k_combo: object

    def values(self):
        """Plain (I, I combo, K, K combo) with the K combo sign restored."""
        return (
            np.exp(self.log_i),
            np.exp(self.log_i_combo),
            np.exp(self.log_k),
            -np.exp(self.log_k_combo),
        )


def debye_bessel(l, z) -> DebyeLogBessel:
    nu = np.asarray(l, dtype=float) + 0.5
    if np.any(nu < 1):
        raise DomainError("Debye expansion needs l >= 1")
    f = debye_factors(z)
    quarter = 0.25 * np.log1p(np.asarray(z, dtype=float) ** 2)
    half_log_2pi = 0.5 * math.log(2.0 * math.pi)
    log_nu = np.log(nu)
    return DebyeLogBessel(
        log_i=nu * f.eta - half_log_2pi - 0.5 * log_nu - quarter + np.log1p(f.u1 / nu),
        log_i_combo=nu * f.eta - half_log_2pi + 0.5 * log_nu + quarter + np.log1p(f.m1 / nu),
        log_k=-nu * f.eta + 0.5 * math.log(math.pi / 2.0) - 0.5 * log_nu - quarter + np.log1p(-f.u1 / nu),
        log_k_combo=-nu * f.eta + 0.5 * math.log(math.pi / 2.0) + 0.5 * log_nu + quarter + np.log1p(-f.m1 / nu),
    )

