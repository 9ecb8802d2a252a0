"""Reading and writing distribution files and JSON reports.

Distribution files are JSON objects ``{"points": [...], "mu_weights":
[...], "p": [...]}`` (``mu_weights`` optional) or CSV with the header
``point,mu_weight,p``.  Points are labels or coordinate arrays.  Density
values are written with 17 significant digits so a write/read cycle
reproduces them bit for bit.  Reports use 12 significant digits.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .errors import AlphaProjError, ParseError
from .measures import Density, WeightedSpace

REPORT_DIGITS = 12
DENSITY_DIGITS = 17


def _finite_number(x: Any, field: str, index: int) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ParseError(f"{field}[{index}]: expected a number, got {x!r}")
    v = float(x)
    if not math.isfinite(v):
        raise ParseError(f"{field}[{index}]: NaN/Inf not allowed")
    return v


def _reject_constant(token: str):
    raise ParseError(f"non-finite literal {token!r} not allowed")


def loads_json(text: str, what: str = "input") -> Any:
    """``json.loads`` that refuses NaN/Infinity and reports ParseError."""
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{what}: {exc}") from exc


def _space_from_points(points: list, weights) -> WeightedSpace:
    if not isinstance(points, list) or not points:
        raise ParseError("points: expected a non-empty array")
    if all(isinstance(pt, list) for pt in points):
        dims = {len(pt) for pt in points}
        if len(dims) != 1:
            raise ParseError("points: coordinate arrays differ in length")
        coords = [
            [_finite_number(c, f"points[{i}]", j) for j, c in enumerate(pt)]
            for i, pt in enumerate(points)
        ]
        pts = np.array(coords, dtype=float)
    elif all(isinstance(pt, (str, int)) and not isinstance(pt, bool) for pt in points):
        pts = points
    else:
        raise ParseError("points: mix labels (strings/integers) and coordinate arrays")
    try:
        return WeightedSpace(pts, weights)
    except AlphaProjError as exc:
        raise ParseError(f"mu_weights: {exc}") from exc
    except ValueError as exc:
        raise ParseError(f"points: {exc}") from exc


def density_from_dict(data: Any) -> Density:
    if not isinstance(data, dict):
        raise ParseError("distribution: top level must be an object")
    extra = set(data) - {"points", "mu_weights", "p"}
    if extra:
        raise ParseError(f"distribution: unknown field(s) {sorted(extra)}")
    for key in ("points", "p"):
        if key not in data:
            raise ParseError(f"{key}: missing field")
    p = data["p"]
    if not isinstance(p, list):
        raise ParseError("p: expected an array")
    values = [_finite_number(v, "p", i) for i, v in enumerate(p)]
    for i, v in enumerate(values):
        if v < 0:
            raise ParseError(f"p[{i}]: negative value {v!r}")
    weights = None
    if "mu_weights" in data:
        mw = data["mu_weights"]
        if not isinstance(mw, list):
            raise ParseError("mu_weights: expected an array")
        weights = [_finite_number(v, "mu_weights", i) for i, v in enumerate(mw)]
        for i, v in enumerate(weights):
            if v <= 0:
                raise ParseError(f"mu_weights[{i}]: must be > 0, got {v!r}")
    space = _space_from_points(data["points"], weights)
    if len(values) != len(space):
        raise ParseError(f"p: {len(values)} values for {len(space)} points")
    try:
        return Density(space, np.array(values))
    except AlphaProjError as exc:
        raise ParseError(f"p: {exc}") from exc


def _csv_point(token: str):
    try:
        v = float(token)
    except ValueError:
        return token
    if not math.isfinite(v):
        raise ParseError(f"point {token!r}: NaN/Inf not allowed")
    return v


def density_from_csv(text: str) -> Density:
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if any(c.strip() for c in r)]
    if not rows or [c.strip() for c in rows[0]] != ["point", "mu_weight", "p"]:
        raise ParseError("csv: header must be point,mu_weight,p")
    points, weights, values = [], [], []
    for k, row in enumerate(rows[1:], start=1):
        if len(row) != 3:
            raise ParseError(f"csv row {k}: expected 3 columns")
        points.append(_csv_point(row[0].strip()))
        for field, token, dest in (("mu_weight", row[1], weights), ("p", row[2], values)):
            try:
                dest.append(float(token))
            except ValueError:
                raise ParseError(f"{field}[{k - 1}]: not a number: {token!r}") from None
    if points and all(isinstance(pt, float) for pt in points):
        pts = [[pt] for pt in points]
    else:
        pts = [str(pt) if isinstance(pt, float) else pt for pt in points]
    return density_from_dict({"points": pts, "mu_weights": weights, "p": values})


def read_density(path: str | Path, fmt: str | None = None) -> Density:
    """Load a distribution file; the format follows the suffix unless given."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    fmt = fmt or ("csv" if path.suffix.lower() == ".csv" else "json")
    if fmt == "csv":
        return density_from_csv(text)
    return density_from_dict(loads_json(text, str(path)))


def _num(v: float, digits: int) -> str:
    return format(float(v), f".{digits}g")


def density_to_json(p: Density) -> str:
    """Serialize with 17 significant digits (exact round trip)."""
    sp = p.space
    if sp.coords is not None:
        pts = "[" + ", ".join(
            "[" + ", ".join(_num(c, DENSITY_DIGITS) for c in row) + "]" for row in sp.coords
        ) + "]"
    else:
        pts = json.dumps(list(sp.points))
    mw = "[" + ", ".join(_num(v, DENSITY_DIGITS) for v in sp.mu_weights) + "]"
    vals = "[" + ", ".join(_num(v, DENSITY_DIGITS) for v in p.values) + "]"
    return f'{{"points": {pts}, "mu_weights": {mw}, "p": {vals}}}\n'


def write_density(p: Density, path: str | Path) -> None:
    Path(path).write_text(density_to_json(p))


def report_value(obj: Any) -> Any:
    """Round floats to 12 significant digits and spell infinities as strings."""
    if isinstance(obj, dict):
        return {str(k): report_value(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [report_value(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return report_value(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "+inf" if v > 0 else "-inf"
        return float(_num(v, REPORT_DIGITS))
    return obj


def dumps_report(obj: Any) -> str:
    """Canonical report text: sorted keys, fixed rounding, trailing newline."""
    return json.dumps(report_value(obj), indent=2, sort_keys=True) + "\n"
