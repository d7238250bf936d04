"""Command-line entry point: ``mvfuse {cluster,path,metrics,graph}``.

Exit status is 0 on success, 1 for invalid input and 2 for runtime
failures. A solve that stops at ``max_iter`` still exits 0 and reports
``"converged": false``.
"""

from __future__ import annotations

import argparse
import logging
import sys
import warnings

import numpy as np

from . import io
from .admm import solve
from .errors import ConvergenceWarning, IoError, MvfuseError, NoSelection, ValidationError
from .graph import build_graph
from .metrics import all_metrics
from .path import grid_search

log = logging.getLogger("mvfuse")


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        io.write_text(text, path)


def cmd_cluster(args):
    cfg = io.load_config(args.config)
    graph = build_graph(cfg.dataset, cfg.params.k_neighbors, cfg.params.phi)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        _, result = solve(cfg.dataset, graph, cfg.params)
    if not result.converged:
        log.warning("solver reached max_iter=%d without converging", cfg.params.max_iter)
    doc = io.result_document(result)
    if cfg.truth is not None:
        doc["metrics"] = all_metrics(cfg.truth, result.labels)
    _emit(io.dumps(doc) + "\n", args.output or cfg.output_path)
    return 0


def cmd_path(args):
    cfg = io.load_config(args.config)
    graph = build_graph(cfg.dataset, cfg.params.k_neighbors, cfg.params.phi)
    selection_error = None
    try:
        result = grid_search(cfg.dataset, graph, cfg.params, cfg.path_spec, truth=cfg.truth)
    except NoSelection as exc:
        if getattr(exc, "result", None) is None:
            raise
        result, selection_error = exc.result, str(exc)
        log.warning("no grid point selected: %s", exc)
    doc = io.path_document(result)
    doc["selection_error"] = selection_error
    _emit(io.dumps(doc) + "\n", args.output or cfg.output_path)
    return 0


def cmd_metrics(args):
    truth = io.load_labels(args.truth)
    pred = io.load_labels(args.pred)
    for name, value in all_metrics(truth, pred).items():
        print(f"{name}={value:.6f}")
    return 0


def cmd_graph(args):
    cfg = io.load_config(args.config)
    graph = build_graph(cfg.dataset, cfg.params.k_neighbors, cfg.params.phi)
    lines = [f"{i + 1},{j + 1},{io._format_float(w)}"
             for (i, j), w in zip(graph.edges.tolist(), graph.weights.tolist())]
    _emit("".join(line + "\n" for line in lines), args.output)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="mvfuse", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="single solve")
    p.add_argument("--config", required=True)
    p.add_argument("--output", help="overrides output_path from the config")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("path", help="regularization path / grid search")
    p.add_argument("--config", required=True)
    p.add_argument("--output", help="overrides output_path from the config")
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("metrics", help="compare two label files")
    p.add_argument("--truth", required=True)
    p.add_argument("--pred", required=True)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("graph", help="print the fusion graph as i,i_prime,omega rows")
    p.add_argument("--config", required=True)
    p.add_argument("--output")
    p.set_defaults(func=cmd_graph)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except IoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (MvfuseError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
