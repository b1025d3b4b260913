"""Introspection of a trained map: distance distortion, per-dimension
influence, influence skewness, and local expansion/contraction.

Location-dependent quantities are evaluated at points of the reduced space.
Unit responsibilities at such a point come from Gaussians placed at the
*projected* centers (the image of each center under the map) with the unit's
original sigma, so each unit keeps its learned region of responsibility.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, DataError, ShapeError
from .model import ModelParams, aggregate_matrix, transform_batch, _as_point
from .neighbors import pairwise_distances

GRID_RESOLUTION_DEFAULT = 100
GRID_MARGIN_DEFAULT = 0.05

_SCALAR_FIELDS = ("variance", "norm")


def reconstruction_error(data, embedding) -> float:
    """Normalized distance distortion between a dataset and its embedding.

    Sum over unordered pairs of |original - embedded| distance, divided by
    the sum of original distances. Zero means every pairwise distance is
    preserved exactly.
    """
    pts = np.asarray(data, dtype=np.float64)
    emb = np.asarray(embedding, dtype=np.float64)
    if pts.ndim != 2 or emb.ndim != 2:
        raise ShapeError("data and embedding must be 2-D arrays")
    if pts.shape[0] != emb.shape[0]:
        raise ShapeError(
            f"embedding has {emb.shape[0]} rows, expected {pts.shape[0]}"
        )
    if pts.shape[0] < 2:
        raise DataError("need at least 2 points to compare pairwise distances")
    rows, cols = np.triu_indices(pts.shape[0], k=1)
    orig = pairwise_distances(pts)[rows, cols]
    redu = pairwise_distances(emb)[rows, cols]
    denom = float(orig.sum())
    if denom == 0.0:
        raise DataError("all points are identical; distance distortion is undefined")
    return float(np.abs(orig - redu).sum() / denom)


def _column_shares(model: ModelParams) -> np.ndarray:
    """Per-unit share of absolute matrix mass by input column, shape (m, d1)."""
    mass = np.abs(model.matrices)
    totals = mass.sum(axis=(1, 2))
    zero = np.flatnonzero(totals == 0.0)
    if zero.size:
        raise DataError(f"matrix {zero[0]} is all zeros; its influence share is undefined")
    return mass.sum(axis=1) / totals[:, None]


def _blend_shares(shares: np.ndarray, weights: np.ndarray) -> np.ndarray:
    blended = np.einsum("i,ij->j", weights, shares)
    total = blended.sum()
    if total <= 0.0:
        # Every weight underflowed: the location carries no information,
        # fall back to the uniform blend.
        m = shares.shape[0]
        blended = np.einsum("i,ij->j", np.full(m, 1.0 / m), shares)
        total = blended.sum()
    return blended / total


def global_influence(model: ModelParams) -> np.ndarray:
    """Mean per-input-dimension share of absolute matrix mass, length d1.

    Scale-free per unit (scaling one matrix does not move its share), entries
    nonnegative and summing to 1.
    """
    shares = _column_shares(model)
    m = model.num_units
    return _blend_shares(shares, np.full(m, 1.0 / m))


def reduced_space_weights(model: ModelParams, p) -> np.ndarray:
    """Unit responsibilities at a reduced-space point.

    Gaussian responses against the projected centers f(mu_i), using each
    unit's original sigma, normalized with the model's epsilon.
    """
    point = _as_point(p, model.output_dim, name="p")
    projected = transform_batch(model, model.centers)
    diffs = point[None, :] - projected
    sq = np.einsum("mk,mk->m", diffs, diffs)
    act = np.exp(-sq / model.sigmas**2)
    return act / (act.sum() + model.epsilon)


def local_influence(model: ModelParams, p, weights=None) -> np.ndarray:
    """Per-input-dimension influence at a reduced-space point, length d1.

    The unit shares are blended by the responsibilities at ``p`` and
    renormalized to sum to 1. Passing ``weights`` overrides the
    responsibilities (they must have length m); uniform weights reproduce
    ``global_influence`` exactly.
    """
    shares = _column_shares(model)
    if weights is None:
        w = reduced_space_weights(model, p)
    else:
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != (model.num_units,):
            raise ShapeError(
                f"weights must have length {model.num_units}, got shape {w.shape}"
            )
    return _blend_shares(shares, w)


def influence_variance(model: ModelParams, p) -> float:
    """Population variance across the entries of the local influence profile.

    Zero exactly when every input dimension carries the same influence at
    ``p``; larger values mean locally skewed representation.
    """
    return float(np.var(local_influence(model, p)))


def local_norm(model: ModelParams, p) -> float:
    """Spectral norm of the responsibility-blended matrix at ``p``.

    Values above 1 mean the map expands space around ``p``; below 1 it
    contracts.
    """
    w = reduced_space_weights(model, p)
    return float(np.linalg.norm(aggregate_matrix(model, w), 2))


def make_grid(embedding, resolution: int, margin_fraction: float = GRID_MARGIN_DEFAULT) -> np.ndarray:
    """Axis-aligned mesh over an embedding's bounding box, expanded by a margin.

    Supports 2-D embeddings only. Returns (resolution^2, 2) points in
    row-major order from the grid minimum: the first axis varies fastest.
    """
    emb = np.asarray(embedding, dtype=np.float64)
    if emb.ndim != 2 or emb.shape[1] != 2:
        raise ShapeError("grid evaluation supports 2-D embeddings only")
    if emb.shape[0] < 1:
        raise DataError("embedding is empty")
    if resolution < 2:
        raise ConfigError("grid resolution must be >= 2")
    if margin_fraction < 0.0:
        raise ConfigError("margin_fraction must be >= 0")
    lo = emb.min(axis=0)
    hi = emb.max(axis=0)
    pad = margin_fraction * (hi - lo)
    lo = lo - pad
    hi = hi + pad
    xs = np.linspace(lo[0], hi[0], resolution)
    ys = np.linspace(lo[1], hi[1], resolution)
    gx, gy = np.meshgrid(xs, ys)  # row-major: y varies per row, x per column
    return np.column_stack([gx.ravel(), gy.ravel()])


def parse_field(field: str):
    """Split a field selector into (kind, component).

    Valid selectors: "variance", "norm", "influence:<j>".
    """
    if field in _SCALAR_FIELDS:
        return field, None
    if field.startswith("influence:"):
        try:
            j = int(field.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad influence component in field '{field}'") from None
        return "influence", j
    raise ConfigError(
        f"unknown field '{field}'; expected influence:J, variance, or norm"
    )


@dataclass(frozen=True)
class GridReport:
    """A mesh over the reduced space with one field value per cell.

    ``values`` has shape (resolution^2,) for scalar fields and
    (resolution^2, d1) for influence fields (the full profile is kept; the
    selected component is the display channel).
    """

    field: str
    component: Optional[int]
    resolution: int
    grid_min: np.ndarray  # (2,)
    grid_max: np.ndarray  # (2,)
    points: np.ndarray    # (resolution^2, 2), row-major from grid_min
    values: np.ndarray    # (N,) or (N, d1)

    @property
    def cell_count(self) -> int:
        return self.points.shape[0]

    def scalar_values(self) -> np.ndarray:
        """The plottable scalar channel: the value itself, or component j of
        an influence profile."""
        if self.values.ndim == 1:
            return self.values
        return self.values[:, self.component]


def grid_report(model: ModelParams, embedding, field: str,
                resolution: int = GRID_RESOLUTION_DEFAULT,
                margin: float = GRID_MARGIN_DEFAULT) -> GridReport:
    """Evaluate a field over a mesh grid spanning the embedding.

    Fields: "influence:<j>" (local influence profile; component j is the
    display channel), "variance" (influence skewness), "norm"
    (expansion/contraction). Cell values equal per-point calls of the
    underlying operation.
    """
    kind, component = parse_field(field)
    if kind == "influence":
        if not 0 <= component < model.input_dim:
            raise ConfigError(
                f"influence component {component} out of range [0, {model.input_dim})"
            )
    points = make_grid(embedding, resolution, margin)
    if kind == "influence":
        values = np.empty((points.shape[0], model.input_dim))
        for t, p in enumerate(points):
            values[t] = local_influence(model, p)
    elif kind == "variance":
        values = np.empty(points.shape[0])
        for t, p in enumerate(points):
            values[t] = influence_variance(model, p)
    else:
        values = np.empty(points.shape[0])
        for t, p in enumerate(points):
            values[t] = local_norm(model, p)
    return GridReport(
        field=field,
        component=component,
        resolution=resolution,
        grid_min=points[0].copy(),
        grid_max=points[-1].copy(),
        points=points,
        values=values,
    )
