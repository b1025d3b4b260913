"""CSV and JSON persistence plus the synthetic S-curve generator.

All numeric text output uses shortest round-trip decimal encoding (Python's
float repr), so written values reload bit-for-bit and repeated runs produce
byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError, SchemaError
from .interpret import GridReport
from .model import ModelParams


def _fmt(value: float) -> str:
    return repr(float(value))


def read_csv(path) -> np.ndarray:
    """Load a numeric CSV as an (n, d) float array.

    A single leading header row is skipped when it does not parse as numbers.
    Ragged rows and non-finite values are rejected with their location.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"input file not found: {path}")
    rows: list[list[float]] = []
    width = None
    with path.open(newline="") as handle:
        for lineno, record in enumerate(csv.reader(handle), start=1):
            if not record:
                continue
            cells = [cell.strip() for cell in record]
            parsed = []
            bad_col = None
            for col, cell in enumerate(cells, start=1):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    bad_col = col
                    break
            if bad_col is not None:
                if lineno == 1:
                    continue  # header row
                raise DataError(
                    f"{path}: row {lineno}, column {bad_col}: "
                    f"'{cells[bad_col - 1]}' is not a number"
                )
            if width is None:
                width = len(parsed)
            elif len(parsed) != width:
                raise DataError(
                    f"{path}: row {lineno} has {len(parsed)} values, expected {width}"
                )
            for col, value in enumerate(parsed, start=1):
                if not math.isfinite(value):
                    raise DataError(
                        f"{path}: row {lineno}, column {col}: non-finite value"
                    )
            rows.append(parsed)
    if not rows:
        raise DataError(f"{path}: no data rows")
    return np.array(rows, dtype=np.float64)


def write_embedding_csv(embedding, path) -> None:
    """Write an embedding as headerless comma-separated rows."""
    arr = np.asarray(embedding, dtype=np.float64)
    lines = [",".join(_fmt(v) for v in row) for row in arr]
    Path(path).write_text("\n".join(lines) + "\n")


def write_model(model: ModelParams, path) -> None:
    """Persist a model as a single JSON document."""
    Path(path).write_text(json.dumps(model.to_dict(), indent=2) + "\n")


def read_model(path) -> ModelParams:
    """Load a model JSON document, validating it against the schema."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"model file not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
    return ModelParams.from_dict(doc)


def write_grid_csv(report: GridReport, path) -> None:
    """Write a grid report: header px,py,value or px,py,w0..w{d1-1}, rows in
    row-major order from the grid minimum."""
    if report.values.ndim == 1:
        header = "px,py,value"
        columns = report.values[:, None]
    else:
        header = "px,py," + ",".join(f"w{j}" for j in range(report.values.shape[1]))
        columns = report.values
    lines = [header]
    for point, vals in zip(report.points, columns):
        lines.append(",".join([_fmt(point[0]), _fmt(point[1])]
                              + [_fmt(v) for v in vals]))
    Path(path).write_text("\n".join(lines) + "\n")


def generate_s_curve(n: int, seed: int = 0, noise: float = 0.0):
    """Synthetic 3-D S-shaped dataset; returns (points (n, 3), color (n,)).

    Each point takes t uniform in [-3pi/2, 3pi/2] and is placed at
    (sin t, 2u, sign(t) * (cos t - 1)) with u uniform in [0, 1]; isotropic
    Gaussian noise scaled by ``noise`` is added when nonzero. The color value
    is t. Deterministic for a fixed seed.
    """
    if n < 1:
        raise ConfigError("n must be >= 1")
    if noise < 0.0:
        raise ConfigError("noise must be >= 0")
    rng = np.random.default_rng(seed)
    t = rng.uniform(-1.5 * np.pi, 1.5 * np.pi, size=n)
    u = rng.uniform(0.0, 1.0, size=n)
    points = np.column_stack([np.sin(t), 2.0 * u, np.sign(t) * (np.cos(t) - 1.0)])
    if noise > 0.0:
        points = points + noise * rng.standard_normal(size=(n, 3))
    return points, t
