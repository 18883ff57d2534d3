"""Run-config parsing and result-file reading/writing.

Config files are INI documents:

    [run]        quantity, method, route, jobs
    [material1]  kind, omega_p_ev | omega_p, gamma_ev | gamma, table
    [material2]  same keys
    [geometry]   R, d
    [sweep]      min, max, points, log
    [quadrature] phi_nodes, t_nodes, s_max, rel_tol_leading, rel_tol_ntlo, refine,
                 u_nodes, w_nodes, v_nodes, max_depth
    [oracle]     l_max, converge, step, xi_nodes, theta_nodes, tolerance
    [output]     path, format

Result files carry a '#' preamble (library version and the full config echo)
followed by CSV rows, or a JSON object {"meta": ..., "records": [...]}.
"""
import configparser
import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple

from pydantic import ValidationError

from app.core.config import settings
from app.core.errors import ConfigError, DataError
from app.models.quantity import Kind, OutputFormat
from app.schemas.result import ComparisonRecord, Diagnostics, KindValues, ResultRecord
from app.schemas.run import RunConfig

logger = logging.getLogger(__name__)

# INI section -> key path inside RunConfig (None = top level)
SECTIONS = {
    "run": None,
    "geometry": None,
    "material1": "material1",
    "material2": "material2",
    "sweep": "sweep",
    "quadrature": "quadrature",
    "oracle": "oracle",
    "output": "output",
}
TOP_LEVEL_KEYS = {
    "run": {"quantity", "method", "route", "jobs"},
    "geometry": {"R", "d"},
}


def _line_index(text: str) -> Dict[Tuple[str, str], int]:
    index = {}
    section = None
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            section = stripped[1:-1].strip()
        elif section and stripped and not stripped.startswith(("#", ";")):
            for sep in ("=", ":"):
                if sep in stripped:
                    index[(section, stripped.split(sep, 1)[0].strip())] = number
                    break
    return index


def _section_of(loc: Tuple[Any, ...]) -> Tuple[str, str]:
    head = str(loc[0]) if loc else ""
    for section, keys in TOP_LEVEL_KEYS.items():
        if head in keys:
            return section, head
    field = str(loc[1]) if len(loc) > 1 else ""
    return head, field


def parse_config_text(text: str, source: str = "<config>") -> Dict[str, Any]:
    """INI text -> nested dict shaped like RunConfig."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc

    data: Dict[str, Any] = {}
    for section in parser.sections():
        if section not in SECTIONS:
            raise ConfigError(f"{source}: unknown section [{section}]")
        target = SECTIONS[section]
        items = dict(parser.items(section))
        if target is None:
            unknown = set(items) - TOP_LEVEL_KEYS[section]
            if unknown:
                raise ConfigError(f"{source}: unknown key(s) {sorted(unknown)}", field=section)
            data.update(items)
        else:
            data.setdefault(target, {}).update(items)
    return data


def merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Recursive dict merge; None values in overrides are ignored."""
    out = dict(base)
    for key, value in overrides.items():
        if value is None:
            continue
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = merge(out[key], value)
        else:
            out[key] = value
    return out


def build_run_config(
    data: Dict[str, Any],
    source: str = "<config>",
    lines: Optional[Dict[Tuple[str, str], int]] = None,
) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        section, field = _section_of(tuple(first["loc"]))
        where = f"[{section}] {field}".strip() if section else "config"
        line = (lines or {}).get((section, field))
        prefix = f"{source}:{line}: " if line else f"{source}: "
        raise ConfigError(f"{prefix}{where}: {first['msg']}") from exc


def load_run_config(
    path: Optional[str],
    overrides: Optional[Dict[str, Any]] = None,
    drop: Iterable[str] = (),
) -> RunConfig:
    """Read an INI config (optional), apply CLI overrides and validate.

    Keys in `drop` are removed from the file data first, so a subcommand can
    replace a file sweep with a single d.
    """
    data: Dict[str, Any] = {}
    lines: Dict[Tuple[str, str], int] = {}
    source = "<flags>"
    if path:
        source = str(path)
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        data = parse_config_text(text, source)
        lines = _line_index(text)
        for key in drop:
            data.pop(key, None)
    return build_run_config(merge(data, overrides or {}), source, lines)


# ---- result files ----------------------------------------------------------

_KIND_LABELS = {
    Kind.ENERGY: ("E", "J"),
    Kind.FORCE: ("F", "N"),
    Kind.GRADIENT: ("G", "N_per_m"),
}
_BASE_COLUMNS = ["d_m", "e", "method", "material1", "material2"]
_DIAG_COLUMNS = [
    "s_reached", "tail_estimate", "phi_nodes", "t_nodes", "error_estimate",
    "l_max", "l_max_trace", "converged", "notes", "failed", "error",
]


def kind_columns(kind: Kind) -> Dict[str, str]:
    p, unit = _KIND_LABELS[kind]
    return {
        "leading": f"{p}_leading_{unit}",
        "ntlo": f"{p}_ntlo_{unit}",
        "sum": f"{p}_sum_{unit}",
        "normalized_leading": f"{p}_norm_leading",
        "normalized_sum": f"{p}_norm_sum",
        "theta": f"theta1_{p}",
    }


def format_float(value: Optional[float]) -> str:
    if value is None:
        return ""
    return format(value, f".{settings.FLOAT_DIGITS}g")


def _parse_float(text: str) -> Optional[float]:
    return None if text == "" else float(text)


def _parse_int(text: str) -> Optional[int]:
    return None if text == "" else int(text)


def build_meta(config: Optional[RunConfig] = None, extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    meta: Dict[str, Any] = {"project": settings.PROJECT_NAME, "version": settings.VERSION}
    if config is not None:
        meta["config"] = config.model_dump(mode="json")
    meta.update(extra or {})
    return meta


def _present_kinds(records: Iterable[ResultRecord]) -> List[Kind]:
    records = list(records)
    return [k for k in Kind if any(r.values(k) is not None for r in records)]


def _record_row(record: ResultRecord, kinds: List[Kind]) -> Dict[str, str]:
    row = {
        "d_m": format_float(record.d),
        "e": format_float(record.e),
        "method": record.method.value,
        "material1": record.material1,
        "material2": record.material2,
    }
    for kind in kinds:
        values = record.values(kind) or KindValues()
        for attr, column in kind_columns(kind).items():
            row[column] = format_float(getattr(values, attr))
    diag = record.diagnostics
    row.update({
        "s_reached": "" if diag.s_reached is None else str(diag.s_reached),
        "tail_estimate": format_float(diag.tail_estimate),
        "phi_nodes": "" if diag.phi_nodes is None else str(diag.phi_nodes),
        "t_nodes": "" if diag.t_nodes is None else str(diag.t_nodes),
        "error_estimate": format_float(diag.error_estimate),
        "l_max": "" if diag.l_max is None else str(diag.l_max),
        "l_max_trace": ";".join(str(v) for v in diag.l_max_trace),
        "converged": str(diag.converged).lower(),
        "notes": json.dumps(diag.notes, sort_keys=True) if diag.notes else "",
        "failed": str(record.failed).lower(),
        "error": record.error or "",
    })
    return row


def write_csv(path, records: List[ResultRecord], meta: Dict[str, Any]) -> None:
    kinds = _present_kinds(records)
    columns = list(_BASE_COLUMNS)
    for kind in kinds:
        columns.extend(kind_columns(kind).values())
    columns.extend(_DIAG_COLUMNS)
    with open(path, "w", newline="") as fh:
        for key, value in meta.items():
            fh.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        for record in records:
            writer.writerow(_record_row(record, kinds))


def write_json(path, records: List[ResultRecord], meta: Dict[str, Any]) -> None:
    payload = {"meta": meta, "records": [r.model_dump(mode="json") for r in records]}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def write_records(path, records: List[ResultRecord], fmt: OutputFormat, meta: Dict[str, Any]) -> None:
    try:
        if OutputFormat(fmt) == OutputFormat.JSON:
            write_json(path, records, meta)
        else:
            write_csv(path, records, meta)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from exc
    logger.info("wrote %d records to %s", len(records), path)


_COMPARISON_COLUMNS = ["d_m", "kind", "key", "value_a", "value_b", "ratio", "difference"]


def write_comparison(path, records: List[ComparisonRecord], fmt: OutputFormat, meta: Dict[str, Any]) -> None:
    try:
        with open(path, "w", newline="") as fh:
            if OutputFormat(fmt) == OutputFormat.JSON:
                payload = {"meta": meta, "records": [r.model_dump(mode="json") for r in records]}
                json.dump(payload, fh, indent=2)
                fh.write("\n")
                return
            for key, value in meta.items():
                fh.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
            writer = csv.writer(fh)
            writer.writerow(_COMPARISON_COLUMNS)
            for r in records:
                writer.writerow([
                    format_float(r.d), r.kind.value, r.key, format_float(r.value_a),
                    format_float(r.value_b), format_float(r.ratio), format_float(r.difference),
                ])
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from exc


def _read_csv(path: Path) -> Tuple[Dict[str, Any], List[ResultRecord]]:
    meta: Dict[str, Any] = {}
    body = []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition(":")
                try:
                    meta[key.strip()] = json.loads(value.strip())
                except json.JSONDecodeError:
                    meta[key.strip()] = value.strip()
            else:
                body.append(line)
    reader = csv.DictReader(body)
    columns = reader.fieldnames or []
    missing = [c for c in _BASE_COLUMNS if c not in columns]
    if missing:
        raise DataError(f"{path}: missing column(s) {missing}")
    kinds = [k for k in Kind if kind_columns(k)["leading"] in columns]

    records = []
    for row in reader:
        fields: Dict[str, Any] = {
            "d": float(row["d_m"]),
            "e": float(row["e"]),
            "method": row["method"],
            "material1": row["material1"],
            "material2": row["material2"],
            "failed": row.get("failed", "false") == "true",
            "error": row.get("error") or None,
        }
        for kind in kinds:
            values = {attr: _parse_float(row[column]) for attr, column in kind_columns(kind).items()}
            # failed points leave their kind columns blank
            fields[kind.value] = values if any(v is not None for v in values.values()) else None
        trace = row.get("l_max_trace", "")
        fields["diagnostics"] = Diagnostics(
            s_reached=_parse_int(row.get("s_reached", "")),
            tail_estimate=_parse_float(row.get("tail_estimate", "")),
            phi_nodes=_parse_int(row.get("phi_nodes", "")),
            t_nodes=_parse_int(row.get("t_nodes", "")),
            error_estimate=_parse_float(row.get("error_estimate", "")),
            l_max=_parse_int(row.get("l_max", "")),
            l_max_trace=[int(v) for v in trace.split(";")] if trace else [],
            converged=row.get("converged", "true") == "true",
            notes=json.loads(row["notes"]) if row.get("notes") else {},
        )
        records.append(ResultRecord.model_validate(fields))
    return meta, records


def _read_json(path: Path) -> Tuple[Dict[str, Any], List[ResultRecord]]:
    with open(path) as fh:
        payload = json.load(fh)
    return payload.get("meta", {}), [ResultRecord.model_validate(r) for r in payload.get("records", [])]


def read_records(path) -> Tuple[Dict[str, Any], List[ResultRecord]]:
    """Parse a CSV or JSON result file (format picked by suffix)."""
    path = Path(path)
    try:
        if path.suffix.lower() == ".json":
            return _read_json(path)
        return _read_csv(path)
    except (OSError, ValueError, KeyError, ValidationError) as exc:
        raise DataError(f"cannot read result file {path}: {exc}") from exc
