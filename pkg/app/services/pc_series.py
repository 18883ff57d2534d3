"""Perfect-conductor anchored series in a_i = 1/omega_{d,i}.

Each tabulated coefficient is an exact combination

    c = r_{-2}/pi^2 + r_0 + r_2 pi^2 + r_4 pi^4

with rational r's; decimal values are derived on demand with mpmath.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction as F
from typing import Dict, List, NamedTuple, Tuple

import mpmath
import numpy as np

from app.core.errors import DomainError, RangeError
from app.models.quantity import Kind

logger = logging.getLogger(__name__)

MAX_ORDER = 5


@dataclass(frozen=True)
class PiPolynomial:
    inv_pi2: F = F(0)
    c0: F = F(0)
    pi2: F = F(0)
    pi4: F = F(0)

    def to_mpf(self, dps: int = 30):
        with mpmath.workdps(dps):
            pi2 = mpmath.pi ** 2
            return (
                mpmath.mpf(self.inv_pi2.numerator) / self.inv_pi2.denominator / pi2
                + mpmath.mpf(self.c0.numerator) / self.c0.denominator
                + mpmath.mpf(self.pi2.numerator) / self.pi2.denominator * pi2
                + mpmath.mpf(self.pi4.numerator) / self.pi4.denominator * pi2 ** 2
            )

    def __float__(self) -> float:
        return float(self.to_mpf())

    def __str__(self) -> str:
        parts = []
        for coeff, suffix in (
            (self.inv_pi2, "/pi^2"),
            (self.c0, ""),
            (self.pi2, "*pi^2"),
            (self.pi4, "*pi^4"),
        ):
            if coeff == 0:
                continue
            sign = "-" if coeff < 0 else "+"
            magnitude = abs(coeff)
            if suffix == "/pi^2":
                text = f"{magnitude.numerator}/({magnitude.denominator}*pi^2)" if magnitude.denominator != 1 \
                    else f"{magnitude.numerator}/pi^2"
            else:
                text = f"{magnitude}{suffix}"
            parts.append((sign, text))
        if not parts:
            return "0"
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, text in parts[1:]:
            out += f" {sign} {text}"
        return out


def _p(inv_pi2=0, c0=0, pi2=0, pi4=0) -> PiPolynomial:
    return PiPolynomial(F(inv_pi2), F(c0), F(pi2), F(pi4))


# beta_{i,j} for i >= j; beta_{j,i} = beta_{i,j}
_BETA: Dict[Tuple[int, int], PiPolynomial] = {
    (0, 0): _p(c0=1),
    (1, 0): _p(c0=F(-4, 3)),
    (2, 0): _p(c0=F(9, 5)),
    (1, 1): _p(c0=F(18, 5)),
    (3, 0): _p(c0=F(-16, 7), pi2=F(32, 735)),
    (2, 1): _p(c0=F(-48, 7)),
    (4, 0): _p(c0=F(25, 9), pi2=F(-326, 1323)),
    (3, 1): _p(c0=F(100, 9), pi2=F(-326, 1323)),
    (2, 2): _p(c0=F(50, 3)),
    (5, 0): _p(c0=F(-36, 11), pi2=F(1220, 1617), pi4=F(-379, 32340)),
    (4, 1): _p(c0=F(-180, 11), pi2=F(2440, 1617)),
    (3, 2): _p(c0=F(-360, 11), pi2=F(1220, 1617)),
}

_LAMBDA: Dict[Tuple[int, int], PiPolynomial] = {
    (0, 0): _p(inv_pi2=-20, c0=F(1, 3)),
    (1, 0): _p(inv_pi2=F(56, 3), c0=F(-32, 45)),
    (0, 1): _p(inv_pi2=F(56, 3), c0=F(-14, 45)),
    (2, 0): _p(inv_pi2=F(-398, 21), c0=F(401, 315)),
    (1, 1): _p(inv_pi2=F(-796, 21), c0=F(454, 315)),
    (0, 2): _p(inv_pi2=F(-398, 21), c0=F(113, 315)),
    (3, 0): _p(inv_pi2=F(410, 21), c0=F(-37, 18), pi2=F(286, 6615)),
    (2, 1): _p(inv_pi2=F(410, 7), c0=F(-26, 7)),
    (1, 2): _p(inv_pi2=F(410, 7), c0=F(-16, 7)),
    (0, 3): _p(inv_pi2=F(410, 21), c0=F(-79, 126), pi2=F(1, 6615)),
    (4, 0): _p(inv_pi2=F(-69824, 3465), c0=F(35141, 10395), pi2=F(-28022, 99225)),
    (3, 1): _p(inv_pi2=F(-279296, 3465), c0=F(84176, 10395), pi2=F(-2774, 14175)),
    (2, 2): _p(inv_pi2=F(-139648, 1155), c0=F(742, 99), pi2=F(32, 11025)),
    (1, 3): _p(inv_pi2=F(-279296, 3465), c0=F(43856, 10395), pi2=F(-46558, 1091475)),
    (0, 4): _p(inv_pi2=F(-69824, 3465), c0=F(14981, 10395), pi2=F(-11962, 1091475)),
    (5, 0): _p(inv_pi2=F(26732, 1287), c0=F(-150368, 27027), pi2=F(4937399, 5675670), pi4=F(-1142, 63063)),
    (4, 1): _p(inv_pi2=F(133660, 1287), c0=F(-35026, 2079), pi2=F(773884, 567567)),
    (3, 2): _p(inv_pi2=F(267320, 1287), c0=F(-548024, 27027), pi2=F(26212, 51597)),
    (2, 3): _p(inv_pi2=F(267320, 1287), c0=F(-415724, 27027), pi2=F(16826, 81081)),
    (1, 4): _p(inv_pi2=F(133660, 1287), c0=F(-256888, 27027), pi2=F(19984, 81081)),
    (0, 5): _p(inv_pi2=F(26732, 1287), c0=F(-84218, 27027), pi2=F(3329, 62370), pi4=F(8059, 2522520)),
}


def _check_order(i: int, j: int) -> None:
    if i < 0 or j < 0 or i + j > MAX_ORDER:
        raise RangeError(f"coefficient ({i}, {j}) outside the tabulated range i + j <= {MAX_ORDER}")


def beta(i: int, j: int) -> PiPolynomial:
    _check_order(i, j)
    return _BETA[(i, j)] if i >= j else _BETA[(j, i)]


def lambda_(i: int, j: int) -> PiPolynomial:
    _check_order(i, j)
    return _LAMBDA[(i, j)]


def _weights(kind: Kind, n: int) -> Tuple[float, float]:
    """Multipliers of beta and lambda at total order n = i + j."""
    if kind == Kind.ENERGY:
        return 1.0, 1.0
    if kind == Kind.FORCE:
        return (n + 2) / 2.0, (n + 1) / 2.0
    if kind == Kind.GRADIENT:
        return (n + 2) * (n + 3) / 6.0, (n + 1) * (n + 2) / 6.0
    raise DomainError(f"unknown kind {kind!r}")


def pc_series_eval(kind: Kind, a1: float, a2: float, e: float, max_order: int = MAX_ORDER) -> float:
    """Multiplier of the perfect-conductor PFA value: leading series plus e times the NTLO series."""
    if max_order < 0 or max_order > MAX_ORDER:
        raise RangeError(f"max_order must lie in [0, {MAX_ORDER}]")
    if a1 < 0 or a2 < 0:
        raise DomainError("a_i = 1/omega_d,i must be non-negative")
    leading = 0.0
    correction = 0.0
    for n in range(max_order + 1):
        wb, wl = _weights(Kind(kind), n)
        for i in range(n + 1):
            j = n - i
            monomial = a1 ** i * a2 ** j
            leading += wb * float(beta(i, j)) * monomial
            correction += wl * float(lambda_(i, j)) * monomial
    return leading + e * correction


class TableRow(NamedTuple):
    i: int
    j: int
    exact: str
    decimal: float


def table_rows(which: str) -> List[TableRow]:
    """beta rows (i >= j) or lambda rows (all i, j) in order of total degree."""
    if which == "beta":
        keys = sorted(_BETA, key=lambda k: (k[0] + k[1], -k[0]))
        table = _BETA
    elif which == "lambda":
        keys = sorted(_LAMBDA, key=lambda k: (k[0] + k[1], -k[0]))
        table = _LAMBDA
    else:
        raise DomainError(f"unknown table {which!r}; expected 'beta' or 'lambda'")
    return [TableRow(i, j, str(table[(i, j)]), float(table[(i, j)])) for i, j in keys]


def fit_leading_slope(values, a) -> float:
    """Estimate beta_10 + beta_01 from normalized leading terms at equal a_1 = a_2 = a.

    Least squares of values - 1 against a and a^2.
    """
    values = np.asarray(values, dtype=float)
    a = np.asarray(a, dtype=float)
    if values.shape != a.shape or values.size < 2:
        raise DomainError("need matching value and a arrays with at least two points")
    design = np.column_stack([a, a ** 2])
    coeffs, *_ = np.linalg.lstsq(design, values - 1.0, rcond=None)
    return float(coeffs[0])
