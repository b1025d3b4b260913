"""Stress-loss training: initialization, analytic gradients, Adam, fit loop.

The objective is the mean squared discrepancy between original-space and
embedded pairwise distances over a fixed pair set. Training is full batch:
one epoch = one gradient step over the whole pair set. The pair set and its
original-space distances are built once, before the first epoch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError, NumericalError, ShapeError
from .model import ModelParams, forward_parts
from .neighbors import PairSet, all_pairs, knn_pairs, _validate_training_points

# Embedded distances below this floor get a zero subgradient for the distance
# term; the loss is not differentiable at exactly coincident images.
_EMBED_DIST_FLOOR = 1e-12


@dataclass
class TrainConfig:
    """All optimizer, initialization, and termination settings."""

    num_units: int
    output_dim: int = 2
    k_neighbors: Optional[int] = None  # None -> all pairs
    max_epochs: int = 2000
    patience: int = 100
    min_improvement: float = 1e-6
    learning_rate: float = 1e-2
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    optimize_centers: bool = False
    seed: int = 0
    sigma_floor: float = 1e-3
    matrix_init_scale: Optional[float] = None
    epsilon: float = 1e-8

    def validate(self) -> None:
        if self.num_units < 1:
            raise ConfigError("num_units must be >= 1")
        if self.output_dim < 1:
            raise ConfigError("output_dim must be >= 1")
        if self.k_neighbors is not None and self.k_neighbors < 1:
            raise ConfigError("k_neighbors must be >= 1 when given")
        if self.max_epochs < 0:
            raise ConfigError("max_epochs must be >= 0")
        if self.patience < 1:
            raise ConfigError("patience must be >= 1")
        if self.min_improvement < 0.0:
            raise ConfigError("min_improvement must be >= 0")
        if self.learning_rate <= 0.0:
            raise ConfigError("learning_rate must be positive")
        if not (0.0 <= self.adam_beta1 < 1.0 and 0.0 <= self.adam_beta2 < 1.0):
            raise ConfigError("adam betas must lie in [0, 1)")
        if self.adam_eps <= 0.0:
            raise ConfigError("adam_eps must be positive")
        if self.sigma_floor <= 0.0:
            raise ConfigError("sigma_floor must be positive")
        if self.matrix_init_scale is not None and self.matrix_init_scale <= 0.0:
            raise ConfigError("matrix_init_scale must be positive when given")
        if self.epsilon <= 0.0:
            raise ConfigError("epsilon must be positive")
        if self.seed < 0:
            raise ConfigError("seed must be a nonnegative integer")


@dataclass
class TrainReport:
    """Per-epoch loss trace and the reason training stopped."""

    loss_history: list[float]
    epochs_run: int
    stop_reason: str  # "max-epochs" | "patience"
    final_loss: float  # last history entry; NaN when no epoch ran


@dataclass(frozen=True)
class AdamState:
    """Bias-corrected first/second moment estimates, keyed by parameter name."""

    step: int
    first_moment: dict
    second_moment: dict

    @classmethod
    def initial(cls, params: dict) -> "AdamState":
        zeros = {name: np.zeros_like(value) for name, value in params.items()}
        return cls(step=0, first_moment=zeros,
                   second_moment={name: np.zeros_like(v) for name, v in params.items()})


def init_model(data, config: TrainConfig) -> ModelParams:
    """Initialize a model for ``data`` under ``config``.

    Centers are ``num_units`` distinct rows sampled from the data without
    replacement, sigmas start at 1, and matrix entries are drawn uniformly
    from [-a, a] with a = matrix_init_scale (default 1/sqrt(d1)). The draw
    order (center indices, then matrices) is fixed, so a seed fully
    determines the result.
    """
    pts = _validate_training_points(data)
    config.validate()
    n, d1 = pts.shape
    m, d2 = config.num_units, config.output_dim
    if m > n:
        raise ConfigError(f"num_units ({m}) cannot exceed the number of points ({n})")
    if not d2 < d1:
        raise ConfigError(f"output_dim ({d2}) must be smaller than the input dimension ({d1})")
    rng = np.random.default_rng(config.seed)
    center_idx = rng.choice(n, size=m, replace=False)
    scale = config.matrix_init_scale if config.matrix_init_scale is not None else 1.0 / math.sqrt(d1)
    matrices = rng.uniform(-scale, scale, size=(m, d2, d1))
    return ModelParams(centers=pts[center_idx], sigmas=np.ones(m),
                       matrices=matrices, epsilon=config.epsilon)


def _check_pairs(pairs: PairSet, n: int) -> None:
    if int(pairs.pairs[:, 1].max()) >= n:
        raise ShapeError("pair set references point indices beyond the dataset")


def _embedded_pair_distances(output: np.ndarray, pairs: PairSet):
    idx_a = pairs.pairs[:, 0]
    idx_b = pairs.pairs[:, 1]
    dy = output[idx_a] - output[idx_b]
    dist = np.sqrt(np.einsum("tk,tk->t", dy, dy))
    return idx_a, idx_b, dy, dist


def loss(model: ModelParams, data, pairs: PairSet) -> float:
    """Mean squared distance discrepancy over the pair set.

    Zero exactly when every pair's distance is preserved.
    """
    pts = np.asarray(data, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != model.input_dim:
        raise ShapeError("data must be (n, d1) and match the model's input dimension")
    _check_pairs(pairs, pts.shape[0])
    output = forward_parts(model, pts).output
    _, _, _, dist = _embedded_pair_distances(output, pairs)
    resid = pairs.distances - dist
    return float(np.mean(resid * resid))


def _loss_and_gradients(model: ModelParams, pts: np.ndarray, pairs: PairSet,
                        optimize_centers: bool):
    """One forward/backward pass; returns (loss, grads keyed by parameter)."""
    n = pts.shape[0]
    parts = forward_parts(model, pts)
    idx_a, idx_b, dy, dist = _embedded_pair_distances(parts.output, pairs)
    resid = pairs.distances - dist
    value = float(np.mean(resid * resid))

    # d loss / d embedded-distance, with the coincident-image subgradient 0.
    inv_dist = np.zeros_like(dist)
    np.divide(1.0, dist, out=inv_dist, where=dist > _EMBED_DIST_FLOOR)
    coef = (-2.0 / pairs.pair_count) * resid * inv_dist

    grad_out = np.empty_like(parts.output)  # d loss / d f(x_p)
    for k in range(parts.output.shape[1]):
        contrib = coef * dy[:, k]
        grad_out[:, k] = (np.bincount(idx_a, weights=contrib, minlength=n)
                          - np.bincount(idx_b, weights=contrib, minlength=n))

    grads = {
        "matrices": np.einsum("pi,pk,pj->ikj", parts.weights, grad_out, pts),
    }
    # Through the normalized weights back to the raw activations.
    grad_w = np.einsum("pk,pik->pi", grad_out, parts.unit_out)
    weighted = np.einsum("pi,pi->p", grad_w, parts.weights)
    grad_act = (grad_w - weighted[:, None]) / parts.denom[:, None]
    scaled = grad_act * parts.activations
    grads["sigmas"] = np.einsum("pi,pi->i", scaled, parts.sq_dists) * 2.0 / model.sigmas**3
    if optimize_centers:
        diffs = pts[:, None, :] - model.centers[None, :, :]
        grads["centers"] = (np.einsum("pi,pij->ij", scaled, diffs)
                            * (2.0 / model.sigmas**2)[:, None])
    return value, grads


def gradients(model: ModelParams, data, pairs: PairSet, config: TrainConfig) -> dict:
    """Analytic gradients of the loss for all trainable parameters.

    Returns a dict with "matrices" (m, d2, d1) and "sigmas" (m,); "centers"
    (m, d1) is included only when config.optimize_centers is set. Matches
    central finite differences of ``loss`` away from coincident-image pairs.
    """
    pts = np.asarray(data, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != model.input_dim:
        raise ShapeError("data must be (n, d1) and match the model's input dimension")
    _check_pairs(pairs, pts.shape[0])
    _, grads = _loss_and_gradients(model, pts, pairs, config.optimize_centers)
    return grads


def adam_step(state: AdamState, params: dict, grads: dict, config: TrainConfig):
    """One Adam update with bias correction; returns (new_state, new_params).

    Inputs are not mutated. Sigma values are clamped to config.sigma_floor
    after the step.
    """
    t = state.step + 1
    b1, b2 = config.adam_beta1, config.adam_beta2
    new_first, new_second, new_params = {}, {}, {}
    for name, theta in params.items():
        g = grads[name]
        if g.shape != theta.shape:
            raise ShapeError(f"gradient for '{name}' has shape {g.shape}, "
                             f"expected {theta.shape}")
        m1 = b1 * state.first_moment[name] + (1.0 - b1) * g
        m2 = b2 * state.second_moment[name] + (1.0 - b2) * (g * g)
        m1_hat = m1 / (1.0 - b1**t)
        m2_hat = m2 / (1.0 - b2**t)
        updated = theta - config.learning_rate * m1_hat / (np.sqrt(m2_hat) + config.adam_eps)
        if name == "sigmas":
            updated = np.maximum(updated, config.sigma_floor)
        new_first[name] = m1
        new_second[name] = m2
        new_params[name] = updated
    return AdamState(t, new_first, new_second), new_params


def build_pair_set(data, config: TrainConfig) -> PairSet:
    """The pair set the loss runs over: kNN-restricted when configured."""
    if config.k_neighbors is None:
        return all_pairs(data)
    return knn_pairs(data, config.k_neighbors)


def fit(data, config: TrainConfig):
    """Train a model on ``data``; returns (ModelParams, TrainReport).

    Each epoch evaluates the loss and gradients at the current parameters,
    records the loss, then applies one Adam step. Training stops at
    max_epochs, or when no epoch has improved the best loss by a relative
    min_improvement margin within the last ``patience`` epochs. The returned
    parameters are the ones that achieved the lowest recorded loss.
    """
    pts = _validate_training_points(data)
    config.validate()
    model = init_model(pts, config)
    pairs = build_pair_set(pts, config)

    fixed_centers = model.centers
    params = {"matrices": model.matrices.copy(), "sigmas": model.sigmas.copy()}
    if config.optimize_centers:
        params["centers"] = model.centers.copy()
    state = AdamState.initial(params)

    history: list[float] = []
    best_loss = math.inf
    best_params = {name: value.copy() for name, value in params.items()}
    stale_epochs = 0
    stop_reason = "max-epochs"

    for _ in range(config.max_epochs):
        current = ModelParams(
            centers=params.get("centers", fixed_centers),
            sigmas=params["sigmas"],
            matrices=params["matrices"],
            epsilon=config.epsilon,
        )
        value, grads = _loss_and_gradients(current, pts, pairs, config.optimize_centers)
        if not math.isfinite(value):
            raise NumericalError(f"loss became non-finite at epoch {len(history)}")
        history.append(value)
        improved = value < best_loss * (1.0 - config.min_improvement)
        if value < best_loss:
            best_loss = value
            best_params = {name: v.copy() for name, v in params.items()}
        if improved:
            stale_epochs = 0
        else:
            stale_epochs += 1
            if stale_epochs >= config.patience:
                stop_reason = "patience"
                break
        state, params = adam_step(state, params, grads, config)

    final = ModelParams(
        centers=best_params.get("centers", fixed_centers),
        sigmas=best_params["sigmas"],
        matrices=best_params["matrices"],
        epsilon=config.epsilon,
    )
    report = TrainReport(
        loss_history=history,
        epochs_run=len(history),
        stop_reason=stop_reason,
        final_loss=history[-1] if history else math.nan,
    )
    return final, report
