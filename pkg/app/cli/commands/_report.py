"""Plain-text summaries printed by compute/sweep/oracle."""
from typing import List, Sequence

from app.models.quantity import Kind
from app.schemas.result import ResultRecord
from app.services.io import kind_columns

_KEYS = ("sum", "normalized_sum", "theta")


def summary_lines(records: Sequence[ResultRecord]) -> List[str]:
    kinds = [k for k in Kind if any(r.values(k) is not None for r in records)]
    header = ["d_m"] + [kind_columns(k)[key] for k in kinds for key in _KEYS]
    lines = ["  ".join(f"{h:>16}" for h in header)]
    for record in records:
        if record.failed:
            lines.append(f"{record.d:>16.6e}  FAILED {record.error}")
            continue
        cells = [f"{record.d:>16.6e}"]
        for kind in kinds:
            values = record.values(kind)
            for key in _KEYS:
                value = getattr(values, key) if values is not None else None
                cells.append(f"{'-':>16}" if value is None else f"{value:>16.8g}")
        lines.append("  ".join(cells))
    return lines


def print_records(records: Sequence[ResultRecord]) -> None:
    for line in summary_lines(records):
        print(line)
