"""Single computations, sweeps and file comparisons behind the CLI."""
import concurrent.futures as futures
import logging
import math
import os
from typing import Dict, List, NamedTuple, Sequence, Tuple

from app.core.constants import CONSTANTS
from app.core.errors import (
    AssemblyError,
    CasimirError,
    ConfigError,
    ConvergenceError,
    DataError,
    DomainError,
    PrecisionError,
    RangeError,
)
from app.models.dielectric import DielectricKind
from app.models.quantity import Kind, Method
from app.schemas.geometry import Geometry
from app.schemas.material import DielectricModel
from app.schemas.result import ComparisonRecord, Diagnostics, KindValues, ResultRecord
from app.schemas.run import RunConfig
from app.services import ntlo, oracle, pc_series, pfa
from app.services.io import build_meta, read_records, write_records

logger = logging.getLogger(__name__)


def expansion_parameter(model: DielectricModel, d: float) -> float:
    """a = 1/omega_d = c/(omega_p d) for the perfect-conductor series."""
    if model.kind == DielectricKind.PERFECT_CONDUCTOR:
        return 0.0
    if model.kind == DielectricKind.PLASMA:
        return CONSTANTS.c / (model.omega_p * d)
    raise DomainError(f"the perfect-conductor series needs plasma or pc materials, got {model.kind.value}")


def _pc_series_values(kind: Kind, model1, model2, geom: Geometry) -> Tuple[KindValues, Diagnostics]:
    a1 = expansion_parameter(model1, geom.d)
    a2 = expansion_parameter(model2, geom.d)
    reference = ntlo.pc_reference(kind, geom)
    norm_leading = pc_series.pc_series_eval(kind, a1, a2, 0.0)
    norm_sum = pc_series.pc_series_eval(kind, a1, a2, geom.e)
    leading = reference * norm_leading
    total = reference * norm_sum
    values = KindValues(
        leading=leading,
        ntlo=total - leading,
        sum=total,
        normalized_leading=norm_leading,
        normalized_sum=norm_sum,
        theta=(norm_sum - norm_leading) / (geom.e * norm_leading),
    )
    # the last tabulated order stands in for the truncation error
    shorter = pc_series.pc_series_eval(kind, a1, a2, geom.e, pc_series.MAX_ORDER - 1)
    diagnostics = Diagnostics(
        error_estimate=abs(norm_sum - shorter) / abs(norm_sum) if norm_sum else 0.0,
        notes={"a1": a1, "a2": a2, "max_order": pc_series.MAX_ORDER},
    )
    return values, diagnostics


def _pfa_values(kind: Kind, model1, model2, geom: Geometry, config: RunConfig) -> Tuple[KindValues, Diagnostics]:
    quad = config.quadrature.apply()
    if kind == Kind.ENERGY:
        result = pfa.pfa_energy_details(model1, model2, geom, quad, route=config.route)
    elif kind == Kind.FORCE:
        result = pfa.pfa_force_details(model1, model2, geom, quad)
    else:
        result = pfa.pfa_gradient_details(model1, model2, geom, quad)
    value = result.value
    normalized = value / ntlo.pc_reference(kind, geom)
    values = KindValues(leading=value, sum=value, normalized_leading=normalized, normalized_sum=normalized)
    return values, result.diagnostics


def evaluate_point(config: RunConfig, d: float) -> ResultRecord:
    """Every requested observable at one separation; failures come back flagged."""
    model1 = config.material1.to_model()
    model2 = config.material2.to_model()
    geom = Geometry.of(config.R, d)
    record = ResultRecord(
        d=d,
        e=geom.e,
        method=config.method,
        material1=model1.describe(),
        material2=model2.describe(),
    )
    kinds = config.quantity.kinds()
    try:
        if config.method == Method.NTLO:
            results = ntlo.compute_all(model1, model2, geom, config.quadrature.apply())
            for kind in kinds:
                r = results[kind]
                setattr(record, kind.value, KindValues(
                    leading=r.leading,
                    ntlo=r.ntlo,
                    sum=r.total,
                    normalized_leading=r.normalized_leading,
                    normalized_sum=r.normalized_sum,
                    theta=r.theta,
                ))
            record.diagnostics = Diagnostics.merged({k.value: results[k].diagnostics for k in kinds})
        elif config.method in (Method.PFA, Method.PC_SERIES):
            per_kind = {}
            for kind in kinds:
                if config.method == Method.PFA:
                    values, diagnostics = _pfa_values(kind, model1, model2, geom, config)
                else:
                    values, diagnostics = _pc_series_values(kind, model1, model2, geom)
                setattr(record, kind.value, values)
                per_kind[kind.value] = diagnostics
            record.diagnostics = Diagnostics.merged(per_kind)
        else:
            trunc = config.oracle.truncation()
            if config.oracle.converge:
                converged = oracle.exact_energy_converged(model1, model2, geom, trunc, step=config.oracle.step)
                value, l_max = converged.value, converged.l_max
                trace = [l for l, _ in converged.trace]
            else:
                details = oracle.exact_energy_details(model1, model2, geom, trunc)
                value, l_max, trace = details.value, details.l_max, []
            record.energy = KindValues(sum=value, normalized_sum=value / ntlo.pc_reference(Kind.ENERGY, geom))
            record.diagnostics = Diagnostics(l_max=l_max, l_max_trace=trace)
    except ConvergenceError as exc:
        logger.warning("d=%.6g m: %s", d, exc)
        record.failed = True
        record.error = f"{type(exc).__name__}: {exc}"
        record.diagnostics = Diagnostics(
            converged=False,
            error_estimate=exc.error_bound,
            s_reached=exc.diagnostics.get("s_reached"),
            l_max_trace=exc.diagnostics.get("l_max_trace", []),
            notes={"estimate": exc.estimate} if exc.estimate is not None else {},
        )
    except CasimirError as exc:
        logger.error("d=%.6g m: %s", d, exc)
        record.failed = True
        record.error = f"{type(exc).__name__}: {exc}"
    return record


def _evaluate_job(job: Tuple[RunConfig, float]) -> ResultRecord:
    config, d = job
    return evaluate_point(config, d)


def worker_count(jobs: int, tasks: int) -> int:
    jobs = jobs or os.cpu_count() or 1
    return max(1, min(jobs, tasks))


class RunOutcome(NamedTuple):
    records: List[ResultRecord]
    exit_code: int


_FAILURE_CODES = {
    cls.__name__: cls.exit_code
    for cls in (ConvergenceError, AssemblyError, PrecisionError, DataError, DomainError, RangeError, ConfigError)
}


def _exit_code(records: Sequence[ResultRecord]) -> int:
    codes = [
        _FAILURE_CODES.get((r.error or "").split(":", 1)[0], 1)
        for r in records if r.failed
    ]
    return max(codes, default=0)


def run(config: RunConfig) -> RunOutcome:
    """Evaluate every separation (in parallel when jobs != 1) and write the output file."""
    # bad material parameters or tables abort before any point is evaluated
    for spec in (config.material1, config.material2):
        spec.to_model()
    separations = config.separations()
    workers = worker_count(config.jobs, len(separations))
    logger.info(
        "%s/%s: %d separation(s), R=%.6g m, %d worker(s)",
        config.method.value, config.quantity.value, len(separations), config.R, workers,
    )
    jobs = [(config, d) for d in separations]
    if workers == 1:
        records = [_evaluate_job(job) for job in jobs]
    else:
        with futures.ProcessPoolExecutor(max_workers=workers) as executor:
            # map keeps input order regardless of completion order
            records = list(executor.map(_evaluate_job, jobs))

    failed = sum(r.failed for r in records)
    logger.info("finished %d point(s), %d failed", len(records), failed)
    if config.output.path:
        write_records(config.output.path, records, config.output.format, build_meta(config))
    return RunOutcome(records, _exit_code(records))


class ComparisonReport(NamedTuple):
    records: List[ComparisonRecord]
    max_deviation: Dict[Tuple[str, str], float]


def _same_grid(a: Sequence[ResultRecord], b: Sequence[ResultRecord]) -> bool:
    if len(a) != len(b):
        return False
    return all(math.isclose(x.d, y.d, rel_tol=1e-12) for x, y in zip(a, b))


def compare_records(
    records_a: Sequence[ResultRecord],
    records_b: Sequence[ResultRecord],
    keys: Sequence[str] = ("sum",),
) -> ComparisonReport:
    if not _same_grid(records_a, records_b):
        raise DataError("result files have different d grids")
    unknown = [k for k in keys if k not in KindValues.model_fields]
    if unknown:
        raise DataError(f"unknown comparison key(s) {unknown}; expected {list(KindValues.model_fields)}")

    out: List[ComparisonRecord] = []
    deviation: Dict[Tuple[str, str], float] = {}
    for ra, rb in zip(records_a, records_b):
        for kind in Kind:
            va, vb = ra.values(kind), rb.values(kind)
            if va is None or vb is None:
                continue
            for key in keys:
                a, b = getattr(va, key), getattr(vb, key)
                ratio = a / b if a is not None and b not in (None, 0.0) else None
                out.append(ComparisonRecord(
                    d=ra.d,
                    kind=kind,
                    key=key,
                    value_a=a,
                    value_b=b,
                    ratio=ratio,
                    difference=None if a is None or b is None else a - b,
                ))
                if ratio is not None:
                    slot = (kind.value, key)
                    deviation[slot] = max(deviation.get(slot, 0.0), abs(ratio - 1.0))
    return ComparisonReport(out, deviation)


def compare(path_a, path_b, keys: Sequence[str] = ("sum",)) -> ComparisonReport:
    """Ratio report between two result files on the same d grid."""
    _, records_a = read_records(path_a)
    _, records_b = read_records(path_b)
    return compare_records(records_a, records_b, keys)
