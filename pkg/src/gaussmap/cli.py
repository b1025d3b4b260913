"""Command-line workflows: fit, transform, inspect, generate, error.

Exit codes: 0 success, 1 usage/configuration error, 2 data or schema error,
3 numerical failure (non-finite loss).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import data_io, interpret, svg, training
from .errors import ConfigError, DataError, NumericalError, ShapeError
from .model import transform_batch

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

DEFAULT_SEED = 0  # every random draw flows from --seed


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _build_parser() -> _Parser:
    parser = _Parser(prog="gaussmap",
                     description="Distance-preserving dimensionality reduction "
                                 "with Gaussian-blended linear maps.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_fit = sub.add_parser("fit", help="train a model on a CSV dataset")
    p_fit.add_argument("--input", required=True)
    p_fit.add_argument("--out-model", required=True)
    p_fit.add_argument("--out-embedding", required=True)
    p_fit.add_argument("--out-report", default=None,
                       help="run report JSON (default: <out-model stem>.report.json)")
    p_fit.add_argument("--units", type=int, default=100)
    p_fit.add_argument("--output-dim", type=int, default=2)
    p_fit.add_argument("--k", type=int, default=None,
                       help="restrict the loss to k nearest neighbors (default: all pairs)")
    p_fit.add_argument("--epochs", type=int, default=2000)
    p_fit.add_argument("--patience", type=int, default=100)
    p_fit.add_argument("--min-improvement", type=float, default=1e-6)
    p_fit.add_argument("--lr", type=float, default=1e-2)
    p_fit.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_fit.add_argument("--optimize-centers", action="store_true")
    p_fit.add_argument("--sigma-floor", type=float, default=1e-3)
    p_fit.add_argument("--matrix-init-scale", type=float, default=None)
    p_fit.add_argument("--epsilon", type=float, default=1e-8)
    p_fit.set_defaults(handler=_cmd_fit)

    p_tr = sub.add_parser("transform", help="embed new points with a saved model")
    p_tr.add_argument("--model", required=True)
    p_tr.add_argument("--input", required=True)
    p_tr.add_argument("--out", required=True)
    p_tr.set_defaults(handler=_cmd_transform)

    p_in = sub.add_parser("inspect", help="evaluate an interpretability field on a grid")
    p_in.add_argument("--model", required=True)
    p_in.add_argument("--embedding", default=None)
    p_in.add_argument("--input", default=None,
                      help="dataset CSV to embed when no embedding file is given")
    p_in.add_argument("--field", required=True,
                      help="influence:J, variance, or norm")
    p_in.add_argument("--resolution", type=int, default=interpret.GRID_RESOLUTION_DEFAULT)
    p_in.add_argument("--margin", type=float, default=interpret.GRID_MARGIN_DEFAULT)
    p_in.add_argument("--out", required=True)
    p_in.add_argument("--svg", default=None)
    p_in.set_defaults(handler=_cmd_inspect)

    p_gen = sub.add_parser("generate", help="write a synthetic dataset")
    p_gen.add_argument("--shape", choices=["s-curve"], default="s-curve")
    p_gen.add_argument("--n", type=int, default=1000)
    p_gen.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_gen.add_argument("--noise", type=float, default=0.0)
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--out-color", default=None,
                       help="optional CSV of per-point color values")
    p_gen.set_defaults(handler=_cmd_generate)

    p_err = sub.add_parser("error", help="print the distance-distortion error")
    p_err.add_argument("--input", required=True)
    p_err.add_argument("--embedding", required=True)
    p_err.set_defaults(handler=_cmd_error)

    return parser


def _cmd_fit(args) -> int:
    data = data_io.read_csv(args.input)
    config = training.TrainConfig(
        num_units=args.units,
        output_dim=args.output_dim,
        k_neighbors=args.k,
        max_epochs=args.epochs,
        patience=args.patience,
        min_improvement=args.min_improvement,
        learning_rate=args.lr,
        seed=args.seed,
        optimize_centers=args.optimize_centers,
        sigma_floor=args.sigma_floor,
        matrix_init_scale=args.matrix_init_scale,
        epsilon=args.epsilon,
    )
    model, report = training.fit(data, config)
    embedding = transform_batch(model, data)
    data_io.write_model(model, args.out_model)
    data_io.write_embedding_csv(embedding, args.out_embedding)
    err = interpret.reconstruction_error(data, embedding)
    report_path = (Path(args.out_report) if args.out_report
                   else Path(args.out_model).with_suffix(".report.json"))
    report_doc = {
        "epochs_run": report.epochs_run,
        "stop_reason": report.stop_reason,
        "final_loss": report.final_loss,
        "reconstruction_error": err,
        "loss_history": report.loss_history,
    }
    report_path.write_text(json.dumps(report_doc, indent=2) + "\n")
    print(f"fit: epochs={report.epochs_run} stop={report.stop_reason} "
          f"final_loss={report.final_loss:.6g} reconstruction_error={err:.6f}")
    return EXIT_OK


def _cmd_transform(args) -> int:
    model = data_io.read_model(args.model)
    data = data_io.read_csv(args.input)
    data_io.write_embedding_csv(transform_batch(model, data), args.out)
    return EXIT_OK


def _cmd_inspect(args) -> int:
    model = data_io.read_model(args.model)
    if args.embedding is not None:
        embedding = data_io.read_csv(args.embedding)
    elif args.input is not None:
        embedding = transform_batch(model, data_io.read_csv(args.input))
    else:
        raise ConfigError("inspect requires --embedding or --input")
    report = interpret.grid_report(model, embedding, args.field,
                                   resolution=args.resolution, margin=args.margin)
    data_io.write_grid_csv(report, args.out)
    if args.svg is not None:
        svg.write_svg_heatmap(report, embedding, args.svg)
    return EXIT_OK


def _cmd_generate(args) -> int:
    points, color = data_io.generate_s_curve(args.n, seed=args.seed, noise=args.noise)
    data_io.write_embedding_csv(points, args.out)
    if args.out_color is not None:
        data_io.write_embedding_csv(color[:, None], args.out_color)
    return EXIT_OK


def _cmd_error(args) -> int:
    data = data_io.read_csv(args.input)
    embedding = data_io.read_csv(args.embedding)
    value = interpret.reconstruction_error(data, embedding)
    print(f"{value:.6f}")
    return EXIT_OK


def cli_main(argv) -> int:
    """Run one CLI invocation; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"gaussmap: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, ShapeError) as exc:  # SchemaError is a DataError
        print(f"gaussmap: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"gaussmap: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"gaussmap: {exc}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
