"""Interpretable dimensionality reduction via Gaussian-blended linear maps.

The model maps R^d1 to R^d2 by blending m linear projections, each weighted
by a normalized Gaussian responsibility, and is trained full-batch to
preserve pairwise distances. Introspection tools report per-dimension
influence, influence skewness, and local expansion/contraction of the
reduced space.
"""

from .errors import (
    ConfigError,
    DataError,
    GaussmapError,
    NumericalError,
    SchemaError,
    ShapeError,
)
from .model import (
    ModelParams,
    aggregate_matrix,
    gaussian_activations,
    normalized_weights,
    transform_batch,
    transform_point,
)
from .neighbors import PairSet, all_pairs, knn_pairs, pairwise_distances
from .training import (
    AdamState,
    TrainConfig,
    TrainReport,
    adam_step,
    build_pair_set,
    fit,
    gradients,
    init_model,
    loss,
)
from .interpret import (
    GridReport,
    global_influence,
    grid_report,
    influence_variance,
    local_influence,
    local_norm,
    make_grid,
    parse_field,
    reconstruction_error,
    reduced_space_weights,
)
from .data_io import (
    generate_s_curve,
    read_csv,
    read_model,
    write_embedding_csv,
    write_grid_csv,
    write_model,
)
from .svg import write_svg_heatmap
from .cli import cli_main

__version__ = "0.1.0"

__all__ = [
    "AdamState",
    "ConfigError",
    "DataError",
    "GaussmapError",
    "GridReport",
    "ModelParams",
    "NumericalError",
    "PairSet",
    "SchemaError",
    "ShapeError",
    "TrainConfig",
    "TrainReport",
    "adam_step",
    "aggregate_matrix",
    "all_pairs",
    "build_pair_set",
    "cli_main",
    "fit",
    "gaussian_activations",
    "generate_s_curve",
    "global_influence",
    "gradients",
    "grid_report",
    "influence_variance",
    "init_model",
    "knn_pairs",
    "local_influence",
    "local_norm",
    "loss",
    "make_grid",
    "normalized_weights",
    "pairwise_distances",
    "parse_field",
    "read_csv",
    "read_model",
    "reconstruction_error",
    "reduced_space_weights",
    "transform_batch",
    "transform_point",
    "write_embedding_csv",
    "write_grid_csv",
    "write_model",
    "write_svg_heatmap",
]
