"""Pairwise distances and pair-set selection for the stress loss.

Neighbor search is exact brute force, O(n^2 * d1): correctness over speed at
the dataset sizes this package targets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError, ShapeError

_BLOCK_ROWS = 512  # caps the (block, n, d) broadcast buffer


@dataclass(frozen=True)
class PairSet:
    """Unordered point-index pairs with their original-space distances.

    ``pairs`` is an (N, 2) int array with pairs[t, 0] < pairs[t, 1], sorted
    lexicographically; ``distances[t]`` is the Euclidean distance between the
    two referenced points.
    """

    pairs: np.ndarray
    distances: np.ndarray

    def __post_init__(self):
        pairs = np.asarray(self.pairs, dtype=np.int64)
        distances = np.asarray(self.distances, dtype=np.float64)
        if pairs.ndim != 2 or pairs.shape[1] != 2:
            raise ShapeError("pairs must be an (N, 2) index array")
        if distances.shape != (pairs.shape[0],):
            raise ShapeError("distances must align with pairs")
        if pairs.shape[0] == 0:
            raise DataError("pair set is empty")
        if np.any(pairs[:, 0] >= pairs[:, 1]):
            raise DataError("every pair must satisfy i < j")
        if np.any(distances < 0.0) or not np.all(np.isfinite(distances)):
            raise DataError("pair distances must be finite and nonnegative")
        pairs.setflags(write=False)
        distances.setflags(write=False)
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "distances", distances)

    @property
    def pair_count(self) -> int:
        return self.pairs.shape[0]


def pairwise_distances(points) -> np.ndarray:
    """Full symmetric Euclidean distance matrix D[i, j] = ||p_i - p_j||.

    Computed from explicit coordinate differences (not the Gram-matrix
    shortcut), so D is exactly symmetric with an exactly zero diagonal.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise ShapeError("points must be a 2-D array (all vectors share a dimension)")
    n = pts.shape[0]
    out = np.empty((n, n), dtype=np.float64)
    for start in range(0, n, _BLOCK_ROWS):
        stop = min(start + _BLOCK_ROWS, n)
        diffs = pts[start:stop, None, :] - pts[None, :, :]
        np.sqrt(np.einsum("bnj,bnj->bn", diffs, diffs), out=out[start:stop])
    return out


def _validate_training_points(data) -> np.ndarray:
    pts = np.asarray(data, dtype=np.float64)
    if pts.ndim != 2:
        raise ShapeError("data must be a 2-D array of points")
    if not np.all(np.isfinite(pts)):
        raise DataError("data contains non-finite coordinates")
    if pts.shape[0] < 2:
        raise DataError(f"need at least 2 points, got {pts.shape[0]}")
    return pts


def all_pairs(data) -> PairSet:
    """Every unordered pair (i, j) with i < j, in lexicographic order."""
    pts = _validate_training_points(data)
    n = pts.shape[0]
    dist = pairwise_distances(pts)
    rows, cols = np.triu_indices(n, k=1)
    return PairSet(pairs=np.column_stack([rows, cols]), distances=dist[rows, cols])


def knn_pairs(data, k: int) -> PairSet:
    """Pairs linking each point to its k nearest neighbors, deduplicated.

    Neighborhoods use original-space distances with ties broken in favor of
    the lower index. The directed relation (i -> j for j in the neighborhood
    of i) is folded to unordered pairs, so mutual neighbors appear once.
    """
    pts = _validate_training_points(data)
    n = pts.shape[0]
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool):
        raise ConfigError("k must be an integer")
    if not 1 <= k <= n - 1:
        raise ConfigError(f"k must be in [1, n-1] = [1, {n - 1}], got {k}")
    dist = pairwise_distances(pts)
    codes = set()
    for i in range(n):
        row = dist[i].copy()
        row[i] = np.inf
        neighborhood = np.argsort(row, kind="stable")[:k]
        for j in neighborhood:
            a, b = (i, int(j)) if i < j else (int(j), i)
            codes.add(a * n + b)
    ordered = np.array(sorted(codes), dtype=np.int64)
    pairs = np.column_stack([ordered // n, ordered % n])
    return PairSet(pairs=pairs, distances=dist[pairs[:, 0], pairs[:, 1]])
