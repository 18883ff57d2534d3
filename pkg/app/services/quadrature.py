"""Quadrature rules, adaptive Gauss-Legendre and the s-series accumulator."""
import logging
from functools import lru_cache
from typing import Callable, NamedTuple, Optional

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_laguerre

from app.core.errors import ConvergenceError

logger = logging.getLogger(__name__)


@lru_cache(maxsize=64)
def _legendre_reference(n: int):
    nodes, weights = leggauss(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@lru_cache(maxsize=64)
def _laguerre_reference(n: int):
    nodes, weights = roots_laguerre(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre(n: int, a: float = -1.0, b: float = 1.0):
    """Nodes and weights on [a, b]."""
    x, w = _legendre_reference(n)
    half = 0.5 * (b - a)
    return half * x + 0.5 * (a + b), half * w


def gauss_laguerre(n: int):
    """Nodes and weights for the weight e^{-u} on [0, inf)."""
    return _laguerre_reference(n)


# graded rules stop at GRADED_DEPTH times the interval length
GRADED_DEPTH = 1e-12
GRADED_WIDTH = 0.1
LAGUERRE_CUTOFF = 60.0
LAGUERRE_FLOOR = 1e-10


@lru_cache(maxsize=64)
def _log_panels(panels: int, n: int, depth: float):
    """Composite Gauss-Legendre in log x on [depth, 1]: nodes and weights for int f(x) dx."""
    edges = np.linspace(np.log(depth), 0.0, panels + 1)
    x, w = _legendre_reference(n)
    half = 0.5 * np.diff(edges)[:, None]
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    nodes = np.exp(mid + half * x[None, :]).ravel()
    weights = (half * w[None, :]).ravel() * nodes
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def graded_legendre(n_bulk: int, panels: int, n: int, length: float = 1.0):
    """Nodes and weights on (0, length] clustered geometrically towards 0.

    [GRADED_WIDTH * length, length] takes an n_bulk-point Gauss-Legendre rule;
    below it `panels` panels of equal length in log x carry n nodes each, down
    to GRADED_DEPTH * length. Resolves boundary layers at 0 of any width above
    that depth.
    """
    split = GRADED_WIDTH * length
    x_bulk, w_bulk = gauss_legendre(n_bulk, split, length)
    x_log, w_log = _log_panels(panels, n, GRADED_DEPTH / GRADED_WIDTH)
    return (
        np.concatenate([split * x_log, x_bulk]),
        np.concatenate([split * w_log, w_bulk]),
    )


def graded_laguerre(panels: int, n: int):
    """Nodes and weights for the weight e^{-u} on [0, inf), graded in log u.

    Stands in for gauss_laguerre when the integrand has branch points close to
    u = 0, which spoil the polynomial accuracy of the Laguerre rule.
    """
    u, w = _log_panels(panels, n, LAGUERRE_FLOOR / LAGUERRE_CUTOFF)
    u = LAGUERRE_CUTOFF * u
    return u, LAGUERRE_CUTOFF * w * np.exp(-u)


class ReducedGrid(NamedTuple):
    """Product grid of the (tau, t) integrals with tau = sin(phi), t = u / (2 S)."""
    tau: np.ndarray         # (n_phi, 1)
    cos_tau: np.ndarray     # sqrt(1 - tau^2), (n_phi, 1)
    phi_weight: np.ndarray  # sin(phi) w_phi, (n_phi, 1)
    u: np.ndarray           # (1, n_u)
    u_weight: np.ndarray    # e^{-u} included, (1, n_u)

    @property
    def shape(self):
        return self.tau.shape[0], self.u.shape[1]


def reduced_grid(phi_nodes: int, t_nodes: int, graded: bool = False, panels: int = 12, panel_nodes: int = 16) -> ReducedGrid:
    """Gauss-Legendre in phi on (0, pi/2) and Gauss-Laguerre in u.

    With `graded`, phi is clustered towards pi/2 (tau -> 1) and u towards 0
    through log-graded panels; cos_tau is then taken from pi/2 - phi directly.
    """
    if graded:
        psi, w_phi = graded_legendre(phi_nodes, panels, panel_nodes, 0.5 * np.pi)
        tau, cos_tau = np.cos(psi), np.sin(psi)
        u, w_u = graded_laguerre(panels, panel_nodes)
    else:
        phi, w_phi = gauss_legendre(phi_nodes, 0.0, 0.5 * np.pi)
        tau, cos_tau = np.sin(phi), np.cos(phi)
        u, w_u = gauss_laguerre(t_nodes)
    return ReducedGrid(
        tau[:, None],
        cos_tau[:, None],
        (tau * w_phi)[:, None],
        np.asarray(u)[None, :],
        np.asarray(w_u)[None, :],
    )


class QuadratureEstimate(NamedTuple):
    value: float
    error: float
    intervals: int


def adaptive_gauss_legendre(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    n: int,
    rel_tol: float,
    max_depth: int,
) -> QuadratureEstimate:
    """Integrate vectorised f over [a, b] by recursive bisection.

    An interval is accepted when its n-point rule and the sum over its two
    halves agree to rel_tol of the running total.
    """
    def rule(lo, hi):
        x, w = gauss_legendre(n, lo, hi)
        return float(np.dot(w, f(x)))

    whole = rule(a, b)
    stack = [(a, b, whole, 0)]
    total = 0.0
    error = 0.0
    intervals = 0
    exhausted = False
    scale = abs(whole)
    while stack:
        lo, hi, coarse, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left, right = rule(lo, mid), rule(mid, hi)
        fine = left + right
        diff = abs(fine - coarse)
        scale = max(scale, abs(fine))
        if diff <= rel_tol * scale or depth >= max_depth:
            if diff > rel_tol * scale:
                exhausted = True
                logger.warning("bisection depth %d reached on [%.6g, %.6g]", depth, lo, hi)
            total += fine
            error += diff
            intervals += 2
        else:
            stack.append((mid, hi, right, depth + 1))
            stack.append((lo, mid, left, depth + 1))
    if exhausted and error > rel_tol * abs(total):
        raise ConvergenceError(
            "adaptive quadrature did not reach tolerance",
            estimate=total,
            error_bound=error,
            diagnostics={"intervals": intervals, "max_depth": max_depth},
        )
    return QuadratureEstimate(total, error, intervals)


def power_law_tail(previous: float, last: float, index: int) -> float:
    """Remaining sum of a series whose terms decay like C n^{-k}.

    `last` is the term with n = index, `previous` the one with n = index - 1.
    """
    if last == 0.0 or previous == 0.0 or np.sign(last) != np.sign(previous):
        return 0.0
    if abs(last) >= abs(previous) or index < 2:
        return 0.0
    k = np.log(previous / last) / np.log(index / (index - 1.0))
    if k <= 1.0:
        return 0.0
    return last * (index / (k - 1.0) - 0.5 + k / (12.0 * index))


class SeriesResult(NamedTuple):
    value: np.ndarray
    terms: int
    tail: np.ndarray
    converged: bool


class SeriesAccumulator:
    """Sums vector-valued terms indexed by s = 0, 1, 2, ...

    A component is settled once `patience` consecutive terms are each below
    rel_tol times its partial sum. The power-law tail of every component is
    added when the loop stops.
    """

    def __init__(self, rel_tol, s_max: int, patience: int = 3):
        self.rel_tol = np.atleast_1d(np.asarray(rel_tol, dtype=float))
        self.s_max = s_max
        self.patience = patience
        self.total: Optional[np.ndarray] = None
        self.previous: Optional[np.ndarray] = None
        self.last: Optional[np.ndarray] = None
        self.quiet: Optional[np.ndarray] = None
        self.count = 0

    def add(self, term) -> bool:
        """Add the next term; returns True once every component has settled."""
        term = np.atleast_1d(np.asarray(term, dtype=float))
        if not np.all(np.isfinite(term)):
            raise ConvergenceError(
                f"non-finite series term at s={self.count}",
                estimate=None if self.total is None else float(self.total[0]),
                diagnostics={"s_reached": self.count},
            )
        if self.total is None:
            self.total = np.zeros_like(term)
            self.quiet = np.zeros(term.shape, dtype=int)
        self.total = self.total + term
        self.previous, self.last = self.last, term
        self.count += 1
        small = np.abs(term) <= self.rel_tol * np.abs(self.total)
        self.quiet = np.where(small, self.quiet + 1, 0)
        return bool(np.all(self.quiet >= self.patience))

    def tail(self) -> np.ndarray:
        if self.previous is None:
            return np.zeros_like(self.total)
        return np.array([
            power_law_tail(p, q, self.count)
            for p, q in zip(self.previous, self.last)
        ])

    def result(self, converged: bool) -> SeriesResult:
        tail = self.tail()
        return SeriesResult(self.total + tail, self.count, tail, converged)


def sum_series(term: Callable[[int], np.ndarray], rel_tol, s_max: int, label: str = "series") -> SeriesResult:
    """Drive a SeriesAccumulator over s = 0..s_max - 1."""
    acc = SeriesAccumulator(rel_tol, s_max)
    for s in range(s_max):
        if acc.add(term(s)):
            result = acc.result(converged=True)
            logger.debug("%s settled after %d terms, tail %s", label, result.terms, result.tail)
            return result
    result = acc.result(converged=False)
    raise ConvergenceError(
        f"{label} did not settle within s_max={s_max}",
        estimate=float(result.value[0]),
        error_bound=float(np.max(np.abs(acc.last))) * s_max,
        diagnostics={"s_reached": s_max, "tail": result.tail.tolist()},
    )
