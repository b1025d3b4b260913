"""Model parameters and the forward transformation.

The map from R^d1 to R^d2 is a blend of ``m`` linear transformations.
Unit ``i`` owns a Gaussian centered at ``centers[i]``:

    g_i(x) = exp(-||x - centers[i]||^2 / sigmas[i]^2)
    w_i(x) = g_i(x) / (sum_j g_j(x) + epsilon)
    f(x)   = sum_i w_i(x) * (matrices[i] @ x)

``matrices[i]`` has shape (d2, d1): rows index output dimensions, columns
index input dimensions. All arithmetic is float64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import SchemaError, ShapeError


def _frozen_f64(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ShapeError(f"{name} contains non-finite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ModelParams:
    """Learned parameters of the blended linear map.

    Immutable after construction; the forward operations are pure functions
    and safe to call concurrently.
    """

    centers: np.ndarray   # (m, d1) Gaussian centers
    sigmas: np.ndarray    # (m,) standard deviations, all > 0
    matrices: np.ndarray  # (m, d2, d1) linear maps
    epsilon: float = 1e-8

    def __post_init__(self):
        centers = _frozen_f64(self.centers, "centers")
        sigmas = _frozen_f64(self.sigmas, "sigmas")
        matrices = _frozen_f64(self.matrices, "matrices")
        if centers.ndim != 2:
            raise ShapeError("centers must be a 2-D array of shape (m, d1)")
        if sigmas.ndim != 1:
            raise ShapeError("sigmas must be a 1-D array of length m")
        if matrices.ndim != 3:
            raise ShapeError("matrices must be a 3-D array of shape (m, d2, d1)")
        m, d1 = centers.shape
        if m < 1 or d1 < 1:
            raise ShapeError("need at least one unit and one input dimension")
        if sigmas.shape[0] != m or matrices.shape[0] != m:
            raise ShapeError(
                f"inconsistent unit counts: centers {m}, sigmas {sigmas.shape[0]}, "
                f"matrices {matrices.shape[0]}"
            )
        d2 = matrices.shape[1]
        if matrices.shape[2] != d1:
            raise ShapeError(
                f"matrices have {matrices.shape[2]} columns, expected d1={d1}"
            )
        if not d2 < d1:
            raise ShapeError(f"output dim must be smaller than input dim, got {d2} >= {d1}")
        if np.any(sigmas <= 0.0):
            raise ShapeError("all sigmas must be positive")
        if not (isinstance(self.epsilon, (int, float)) and self.epsilon > 0.0
                and math.isfinite(self.epsilon)):
            raise ShapeError("epsilon must be a positive finite scalar")
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "sigmas", sigmas)
        object.__setattr__(self, "matrices", matrices)
        object.__setattr__(self, "epsilon", float(self.epsilon))

    @property
    def num_units(self) -> int:
        return self.centers.shape[0]

    @property
    def input_dim(self) -> int:
        return self.centers.shape[1]

    @property
    def output_dim(self) -> int:
        return self.matrices.shape[1]

    def to_dict(self) -> dict:
        """Serialize to the model-document schema (plain Python types)."""
        return {
            "input_dim": self.input_dim,
            "output_dim": self.output_dim,
            "epsilon": self.epsilon,
            "centers": self.centers.tolist(),
            "sigmas": self.sigmas.tolist(),
            "matrices": self.matrices.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ModelParams":
        """Reconstruct a model from its document form.

        Raises SchemaError naming the offending field on any mismatch.
        """
        if not isinstance(doc, dict):
            raise SchemaError("model document must be a JSON object")
        for key in ("input_dim", "output_dim", "epsilon", "centers", "sigmas", "matrices"):
            if key not in doc:
                raise SchemaError(f"missing field '{key}'")
        d1, d2 = doc["input_dim"], doc["output_dim"]
        if not (isinstance(d1, int) and d1 >= 1):
            raise SchemaError("'input_dim' must be a positive integer")
        if not (isinstance(d2, int) and d2 >= 1):
            raise SchemaError("'output_dim' must be a positive integer")
        centers = _schema_array(doc["centers"], "centers", ndim=2)
        sigmas = _schema_array(doc["sigmas"], "sigmas", ndim=1)
        m = centers.shape[0]
        if centers.shape != (m, d1):
            raise SchemaError(f"'centers' has shape {centers.shape}, expected ({m}, {d1})")
        if sigmas.shape != (m,):
            raise SchemaError(f"'sigmas' has length {sigmas.shape[0]}, expected {m}")
        raw = doc["matrices"]
        if not isinstance(raw, list) or len(raw) != m:
            raise SchemaError(f"'matrices' must list {m} matrices")
        matrices = np.empty((m, d2, d1), dtype=np.float64)
        for i, entry in enumerate(raw):
            block = _schema_array(entry, f"matrices[{i}]", ndim=2)
            if block.shape != (d2, d1):
                raise SchemaError(
                    f"'matrices[{i}]' has shape {block.shape}, expected ({d2}, {d1})"
                )
            matrices[i] = block
        try:
            return cls(centers=centers, sigmas=sigmas, matrices=matrices,
                       epsilon=doc["epsilon"])
        except ShapeError as exc:
            raise SchemaError(str(exc)) from exc


def _schema_array(values, name: str, ndim: int) -> np.ndarray:
    try:
        arr = np.array(values, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"'{name}' is not a numeric array: {exc}") from exc
    if arr.ndim != ndim:
        raise SchemaError(f"'{name}' must be {ndim}-dimensional, got {arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise SchemaError(f"'{name}' contains non-finite values")
    return arr


def _as_batch(x, dim: int, name: str = "data") -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be a 2-D array of points, got ndim={arr.ndim}")
    if arr.shape[1] != dim:
        raise ShapeError(f"{name} has dimension {arr.shape[1]}, expected {dim}")
    return arr


def _as_point(x, dim: int, name: str = "x") -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != dim:
        raise ShapeError(f"{name} must be a vector of length {dim}, got shape {arr.shape}")
    return arr


class ForwardParts(NamedTuple):
    """Intermediate quantities of a batched forward pass (training reuses them)."""

    sq_dists: np.ndarray     # (n, m) squared distances to centers
    activations: np.ndarray  # (n, m) Gaussian responses g_i(x)
    denom: np.ndarray        # (n,) sum of responses + epsilon
    weights: np.ndarray      # (n, m) normalized weights w_i(x)
    unit_out: np.ndarray     # (n, m, d2) per-unit projections M_i @ x
    output: np.ndarray       # (n, d2) blended outputs f(x)


def forward_parts(model: ModelParams, batch: np.ndarray) -> ForwardParts:
    """Run the forward pass on a validated (n, d1) batch.

    Uses only order-deterministic reductions (no BLAS dispatch), so results
    are bitwise independent of the batch size a point is embedded in.
    """
    diffs = batch[:, None, :] - model.centers[None, :, :]
    sq_dists = np.einsum("nmj,nmj->nm", diffs, diffs)
    activations = np.exp(-sq_dists / model.sigmas[None, :] ** 2)
    denom = np.einsum("nm->n", activations) + model.epsilon
    weights = activations / denom[:, None]
    unit_out = np.einsum("mkj,nj->nmk", model.matrices, batch)
    output = np.einsum("nm,nmk->nk", weights, unit_out)
    return ForwardParts(sq_dists, activations, denom, weights, unit_out, output)


def gaussian_activations(model: ModelParams, x) -> np.ndarray:
    """Gaussian response of every unit at ``x``: exp(-||x - mu_i||^2 / sigma_i^2).

    Each value lies in (0, 1]; a response underflows to exactly 0.0 for points
    extremely far from a center, which downstream code accepts.
    """
    point = _as_point(x, model.input_dim)
    return forward_parts(model, point[None, :]).activations[0]


def normalized_weights(model: ModelParams, x) -> np.ndarray:
    """Blend weights at ``x``: responses normalized by their sum plus epsilon.

    The weights sum to sum(g) / (sum(g) + epsilon), slightly below 1; epsilon
    keeps the division defined even when every response underflows.
    """
    point = _as_point(x, model.input_dim)
    return forward_parts(model, point[None, :]).weights[0]


def transform_point(model: ModelParams, x) -> np.ndarray:
    """Map a single point to the reduced space.

    Cost is O(m * d1 * d2), independent of any training set.
    """
    point = _as_point(x, model.input_dim)
    return forward_parts(model, point[None, :]).output[0]


def transform_batch(model: ModelParams, data) -> np.ndarray:
    """Map an (n, d1) batch to an (n, d2) embedding.

    Row i is bitwise identical to ``transform_point(model, data[i])``.
    """
    batch = _as_batch(data, model.input_dim)
    return forward_parts(model, batch).output


def aggregate_matrix(model: ModelParams, weights) -> np.ndarray:
    """Weighted sum of the unit matrices: sum_i weights[i] * matrices[i]."""
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.shape[0] != model.num_units:
        raise ShapeError(
            f"weights must be a vector of length {model.num_units}, got shape {w.shape}"
        )
    return np.einsum("m,mkj->kj", w, model.matrices)
