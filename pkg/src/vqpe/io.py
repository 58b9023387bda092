"""CSV tables and run manifests.

Floats are written with ``%.17g`` so that a CSV read back reproduces the
computed doubles exactly and reruns with identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from .errors import VQPEError


class OutputError(VQPEError, OSError):
    """Failure writing an output file; the message carries the path."""


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return "%.17g" % v
    try:
        return format_value(float(v)) if not isinstance(v, str) else v
    except (TypeError, ValueError):
        return str(v)


def write_csv(path: Path, columns, rows, comments=()) -> Path:
    """Write ``rows`` (dicts or sequences) under a header row.

    ``comments`` become leading ``# ...`` lines, used for units.
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            for line in comments:
                fh.write(f"# {line}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                values = [row.get(c) for c in columns] if isinstance(row, dict) else row
                writer.writerow([format_value(v) for v in values])
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    with Path(path).open() as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    return header, [row for row in reader]


def write_json(path: Path, data) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path
