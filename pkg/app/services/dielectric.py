"""Permittivity eps(i xi) on the imaginary frequency axis.

Physical entry point `permittivity(model, xi)` and the reduced form
`permittivity_reduced(model, t, tau, groups)` used inside the asymptotic
integrals, where xi = c t sqrt(1 - tau^2) / d.
"""
import logging
from pathlib import Path

import numpy as np

from app.core.constants import CONSTANTS, DimensionlessGroups
from app.core.errors import DataError, DomainError
from app.models.dielectric import DielectricKind
from app.schemas.material import DielectricModel

logger = logging.getLogger(__name__)


class PerfectConductorMarker:
    """Symbolic infinite permittivity; coefficient formulas use their analytic limits."""
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "PERFECT_CONDUCTOR"


PERFECT_CONDUCTOR = PerfectConductorMarker()


def is_perfect_conductor(eps) -> bool:
    return eps is PERFECT_CONDUCTOR


def has_damping_scale(*models: DielectricModel) -> bool:
    """True when a model stops being plasma-like below its relaxation frequency.

    The TE reflection of such a medium switches off as xi -> 0, which puts a
    boundary layer at tau -> 1 into the reduced integrals.
    """
    return any(m.kind == DielectricKind.DRUDE and m.gamma > 0 for m in models)


def permittivity_limit(model: DielectricModel):
    """Value of eps(i xi) as xi -> 0+."""
    if model.kind == DielectricKind.VACUUM:
        return 1.0
    if model.kind == DielectricKind.PERFECT_CONDUCTOR:
        return PERFECT_CONDUCTOR
    if model.kind in (DielectricKind.PLASMA, DielectricKind.DRUDE):
        return np.inf
    raise DomainError("custom tables are not extrapolated to xi = 0")


def permittivity(model: DielectricModel, xi, allow_limit: bool = False):
    """eps(i xi) for scalar or array xi in rad/s.

    Plasma and Drude models have a pole at xi = 0; those points raise unless
    `allow_limit` is set, in which case they take the xi -> 0 limit.
    """
    if model.kind == DielectricKind.PERFECT_CONDUCTOR:
        return PERFECT_CONDUCTOR

    xi_arr = np.asarray(xi, dtype=float)
    if model.kind == DielectricKind.VACUUM:
        out = np.ones_like(xi_arr)
        return float(out) if out.ndim == 0 else out

    at_pole = xi_arr <= 0
    if np.any(at_pole) and not allow_limit:
        raise DomainError(f"{model.kind.value} permittivity needs xi > 0")

    with np.errstate(divide="ignore", invalid="ignore"):
        if model.kind == DielectricKind.PLASMA:
            out = 1.0 + model.omega_p ** 2 / xi_arr ** 2
        elif model.kind == DielectricKind.DRUDE:
            out = 1.0 + model.omega_p ** 2 / (xi_arr * (xi_arr + model.gamma))
        else:
            out = _interpolate_table(model, xi_arr)
    if np.any(at_pole):
        out = np.where(at_pole, np.inf, out)
    return float(out) if out.ndim == 0 else out


def _interpolate_table(model: DielectricModel, xi: np.ndarray) -> np.ndarray:
    table_xi = np.asarray(model.xi_table)
    table_eps = np.asarray(model.eps_table)
    if np.any(xi < table_xi[0]) or np.any(xi > table_xi[-1]):
        raise DomainError(
            f"xi outside the tabulated range [{table_xi[0]:.6g}, {table_xi[-1]:.6g}] rad/s"
        )
    log_eps = np.interp(np.log(xi), np.log(table_xi), np.log(table_eps))
    return np.exp(log_eps)


def permittivity_reduced(
    model: DielectricModel,
    t,
    tau,
    groups: DimensionlessGroups,
    medium: int = 0,
    cos_tau=None,
):
    """eps in the (t, tau) variables of the asymptotic integrals.

    Plasma:  1 + w_d^2 / (t^2 (1 - tau^2))
    Drude:   1 + w_d^2 / (t sqrt(1 - tau^2) (t sqrt(1 - tau^2) + g_d))
    with w_d = omega_p d / c and g_d = gamma d / c. Custom tables go through
    the physical frequency xi = c t sqrt(1 - tau^2) / d. Grids that reach
    tau = 1 in floating point pass cos_tau = sqrt(1 - tau^2) themselves.
    """
    tau_arr = np.asarray(tau, dtype=float)
    t_arr = np.asarray(t, dtype=float)
    if cos_tau is None:
        if np.any(tau_arr <= 0) or np.any(tau_arr >= 1):
            raise DomainError("tau must lie strictly inside (0, 1)")
        cos_tau = np.sqrt((1.0 - tau_arr) * (1.0 + tau_arr))
    else:
        cos_tau = np.asarray(cos_tau, dtype=float)
        if np.any(tau_arr <= 0) or np.any(cos_tau <= 0):
            raise DomainError("tau must lie strictly inside (0, 1)")
    if np.any(t_arr <= 0):
        raise DomainError("t must be positive")

    if model.kind == DielectricKind.PERFECT_CONDUCTOR:
        return PERFECT_CONDUCTOR
    if model.kind == DielectricKind.VACUUM:
        return np.ones(np.broadcast(t_arr, tau_arr).shape)

    if model.kind == DielectricKind.PLASMA:
        omega_d = groups.omega_d[medium] if groups.omega_d else model.omega_p * groups.d / CONSTANTS.c
        return 1.0 + omega_d ** 2 / (t_arr * cos_tau) ** 2
    if model.kind == DielectricKind.DRUDE:
        omega_d = groups.omega_d[medium] if groups.omega_d else model.omega_p * groups.d / CONSTANTS.c
        gamma_d = groups.gamma_d[medium] if groups.gamma_d else model.gamma * groups.d / CONSTANTS.c
        x = t_arr * cos_tau
        return 1.0 + omega_d ** 2 / (x * (x + gamma_d))
    return permittivity(model, CONSTANTS.c * t_arr * cos_tau / groups.d)


def reduced_groups(model1: DielectricModel, model2: DielectricModel, R: float, d: float) -> DimensionlessGroups:
    """Dimensionless groups for a sphere/plate pair (medium 0 = sphere, 1 = plate)."""
    from app.core.constants import dimensionless_groups
    return dimensionless_groups(
        R,
        d,
        omega_p=(model1.omega_p, model2.omega_p),
        gamma=(model1.gamma, model2.gamma),
    )


def load_permittivity_table(path) -> DielectricModel:
    """Read a two-column (xi [rad/s], eps) text file with '#' comments."""
    path = Path(path)
    try:
        data = np.loadtxt(path, comments="#", ndmin=2)
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read permittivity table {path}: {exc}") from exc
    if data.shape[1] != 2:
        raise DataError(f"{path}: expected two columns, found {data.shape[1]}")
    logger.debug("loaded %d permittivity samples from %s", data.shape[0], path)
    try:
        return DielectricModel.custom(data[:, 0], data[:, 1], label=path.stem)
    except DomainError as exc:
        raise DataError(f"{path}: {exc}") from exc
