"""Reading and writing sampled curves.

JSON layout::

    {"grid": [t, ...], "points": [[x, y, z], ...], "derivatives": [[dx, dy, dz], ...]}

with ``derivatives`` optional.  The CSV layout has the header ``t,x,y,z``
and may carry ``dx,dy,dz`` columns after it.  Every real is written with 17
significant digits, so a write/read round trip is exact.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .metric_core import Partition, SampledCurve

_FMT = "{:.17g}"


def _num(v: float) -> str:
    v = float(v)
    if not np.isfinite(v):
        raise ValueError("cannot serialize non-finite values")
    return _FMT.format(v)


def _array(values) -> str:
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        return "[" + ", ".join(_num(v) for v in values) + "]"
    return "[" + ", ".join(_array(row) for row in values) + "]"


def dumps_curve(curve: SampledCurve) -> str:
    parts = [f'"grid": {_array(curve.t)}', f'"points": {_array(curve.points)}']
    if curve.derivatives is not None:
        parts.append(f'"derivatives": {_array(curve.derivatives)}')
    return "{" + ", ".join(parts) + "}\n"


def loads_curve(text: str) -> SampledCurve:
    data = json.loads(text)
    try:
        grid = np.asarray(data["grid"], dtype=float)
        points = np.asarray(data["points"], dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError("curve JSON needs 'grid' and 'points'") from exc
    derivs = data.get("derivatives")
    if derivs is not None:
        derivs = np.asarray(derivs, dtype=float)
    return SampledCurve(Partition(grid), points, derivs)


def curve_to_csv(curve: SampledCurve) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["t", "x", "y", "z"]
    if curve.derivatives is not None:
        header += ["dx", "dy", "dz"]
    writer.writerow(header)
    for i, t in enumerate(curve.t):
        row = [t, *curve.points[i]]
        if curve.derivatives is not None:
            row += list(curve.derivatives[i])
        writer.writerow([_num(v) for v in row])
    return buf.getvalue()


def curve_from_csv(text: str) -> SampledCurve:
    reader = csv.reader(io.StringIO(text))
    header = [h.strip() for h in next(reader)]
    if header[:4] != ["t", "x", "y", "z"]:
        raise ValueError("CSV curves need the header t,x,y,z")
    rows = np.array([[float(v) for v in row] for row in reader if row], dtype=float)
    if rows.ndim != 2 or rows.shape[0] < 2:
        raise ValueError("CSV curve needs at least two rows")
    derivs = rows[:, 4:7] if len(header) >= 7 else None
    return SampledCurve(Partition(rows[:, 0]), rows[:, 1:4], derivs)


def read_curve(path) -> SampledCurve:
    """Load a curve, choosing the format from the file extension (``.csv`` or JSON)."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv":
        return curve_from_csv(text)
    return loads_curve(text)


def format_curve(curve: SampledCurve, fmt: str = "json") -> str:
    if fmt == "json":
        return dumps_curve(curve)
    if fmt == "csv":
        return curve_to_csv(curve)
    raise ValueError(f"unknown curve format {fmt!r}")


def write_curve(curve: SampledCurve, path, fmt: str | None = None) -> None:
    path = Path(path)
    if fmt is None:
        fmt = "csv" if path.suffix.lower() == ".csv" else "json"
    path.write_text(format_curve(curve, fmt))
