"""Shared flags and config resolution for the subcommands."""
import argparse
from typing import Any, Dict, Iterable, Optional

from app.core.config import settings
from app.core.errors import ConfigError
from app.core.logging import setup_logging
from app.models.dielectric import DielectricKind
from app.models.quantity import Method, OutputFormat, Quantity, Route
from app.schemas.run import RunConfig
from app.services.io import load_run_config


def parse_material(text: str) -> Dict[str, Any]:
    """'pc', 'vacuum', 'plasma:9', 'drude:9:0.035' (eV) or 'custom:table.csv'."""
    kind, _, rest = text.partition(":")
    try:
        kind = DielectricKind(kind.strip().lower())
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"unknown material kind {kind!r}; expected one of {[k.value for k in DielectricKind]}"
        )
    spec: Dict[str, Any] = {"kind": kind.value}
    if kind == DielectricKind.CUSTOM:
        if not rest:
            raise argparse.ArgumentTypeError("custom material needs a table path, e.g. custom:gold.csv")
        spec["table"] = rest
        return spec
    parts = [p for p in rest.split(":") if p]
    try:
        numbers = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad material parameters in {text!r}")
    if kind in (DielectricKind.PLASMA, DielectricKind.DRUDE) and numbers:
        spec["omega_p_ev"] = numbers[0]
    if kind == DielectricKind.DRUDE and len(numbers) > 1:
        spec["gamma_ev"] = numbers[1]
    return spec


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="INI run config (default: $CASIMIR_CONFIG)")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"])


def add_run_arguments(parser: argparse.ArgumentParser, with_method: bool = True) -> None:
    add_common_arguments(parser)
    group = parser.add_argument_group("run")
    group.add_argument("--quantity", choices=[q.value for q in Quantity])
    if with_method:
        group.add_argument("--method", choices=[m.value for m in Method])
    group.add_argument("--route", choices=[r.value for r in Route])
    group.add_argument("--material1", type=parse_material, metavar="KIND[:WP[:GAMMA]]", help="sphere material")
    group.add_argument("--material2", type=parse_material, metavar="KIND[:WP[:GAMMA]]", help="plate material")
    group.add_argument("--material", type=parse_material, metavar="KIND[:WP[:GAMMA]]", help="both bodies")
    group.add_argument("-R", "--radius", dest="R", type=float, help="sphere radius in m")
    group.add_argument("--jobs", type=int, help="worker processes (0 = all cores)")

    quad = parser.add_argument_group("quadrature")
    quad.add_argument("--phi-nodes", type=int)
    quad.add_argument("--t-nodes", type=int)
    quad.add_argument("--s-max", type=int)
    quad.add_argument("--rel-tol-leading", type=float)
    quad.add_argument("--rel-tol-ntlo", type=float)
    quad.add_argument("--no-refine", dest="refine", action="store_const", const=False)

    out = parser.add_argument_group("output")
    out.add_argument("-o", "--output", help="result file path")
    out.add_argument("--format", choices=[f.value for f in OutputFormat])


def add_sweep_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("sweep")
    group.add_argument("--min", dest="sweep_min", type=float, help="smallest d in m")
    group.add_argument("--max", dest="sweep_max", type=float, help="largest d in m")
    group.add_argument("--points", type=int)
    group.add_argument("--linear", dest="log", action="store_const", const=False, help="linear spacing")


def run_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Namespace -> nested dict in RunConfig shape; unset flags are None and dropped by merge()."""
    get = lambda name: getattr(args, name, None)  # noqa: E731
    material1 = get("material1") or get("material")
    material2 = get("material2") or get("material")
    return {
        "quantity": get("quantity"),
        "method": get("method"),
        "route": get("route"),
        "jobs": get("jobs"),
        "R": get("R"),
        "d": get("d"),
        "material1": material1,
        "material2": material2,
        "sweep": {
            "min": get("sweep_min"),
            "max": get("sweep_max"),
            "points": get("points"),
            "log": get("log"),
        },
        "quadrature": {
            "phi_nodes": get("phi_nodes"),
            "t_nodes": get("t_nodes"),
            "s_max": get("s_max"),
            "rel_tol_leading": get("rel_tol_leading"),
            "rel_tol_ntlo": get("rel_tol_ntlo"),
            "refine": get("refine"),
        },
        "oracle": {
            "l_max": get("l_max"),
            "converge": get("converge"),
            "step": get("step"),
            "xi_nodes": get("xi_nodes"),
            "theta_nodes": get("theta_nodes"),
        },
        "output": {"path": get("output"), "format": get("format")},
    }


def _prune(data: Dict[str, Any]) -> Dict[str, Any]:
    out = {}
    for key, value in data.items():
        if isinstance(value, dict):
            value = _prune(value)
            if not value:
                continue
        if value is not None:
            out[key] = value
    return out


def config_path(args: argparse.Namespace) -> Optional[str]:
    return getattr(args, "config", None) or settings.CASIMIR_CONFIG or None


def get_run_config(args: argparse.Namespace, drop: Iterable[str] = (), **forced: Any) -> RunConfig:
    """Config file (if any) overridden by flags, then by values a subcommand pins."""
    overrides = _prune(run_overrides(args))
    overrides.update(forced)
    return load_run_config(config_path(args), overrides, drop=drop)


def configure_logging(args: argparse.Namespace) -> None:
    setup_logging(getattr(args, "log_level", None))


def require(condition: bool, message: str, field: Optional[str] = None) -> None:
    if not condition:
        raise ConfigError(message, field=field)
