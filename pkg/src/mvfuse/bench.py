"""Timing of the one-time factorization and the per-iteration ADMM cost."""

from __future__ import annotations

import csv
import io
import statistics
import time
from dataclasses import astuple, dataclass, fields

from .admm import initialize, step
from .data import HyperParams, View, assemble_dataset
from .graph import FusionGraph, build_graph
from .testing import make_blobs

DEFAULT_NS = (50, 100, 200)
DEFAULT_PS = (20, 80, 320)
DEFAULT_SIZES = tuple((n, p) for n in DEFAULT_NS for p in DEFAULT_PS)


@dataclass(frozen=True)
class TimingRow:
    n: int
    p: int
    n_edges: int
    t_factor: float
    t_per_iter: float


def _median_time(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def time_instance(n, p, repeats=3, iters=20, k_neighbors=5, seed=0) -> TimingRow:
    """Median wall-clock factorization time and mean time per iteration.

    Each factorization repeat uses a fresh graph object with the same edges,
    so the cache is cold every time.
    """
    X, _ = make_blobs(n, p, seed=seed)
    dataset = assemble_dataset([View(X, "gaussian")])
    graph = build_graph(dataset, k_neighbors=k_neighbors, phi=1.0)
    _ = graph.gram

    def factor():
        fresh = FusionGraph(n=graph.n, edges=graph.edges, weights=graph.weights)
        fresh.__dict__["gram"] = graph.gram
        fresh.factorization()

    t_factor = _median_time(factor, repeats)

    params = HyperParams(eta=1.0, beta=1.0, theta=0.5, sigma=1.0, k_neighbors=k_neighbors)
    graph.factorization()
    state0 = initialize(dataset, graph, params)

    def iterate():
        state = state0
        for _ in range(iters):
            state = step(state, dataset, graph, params)

    iterate()  # warm-up
    t_iter = _median_time(iterate, repeats) / iters
    return TimingRow(n, p, graph.n_edges, t_factor, t_iter)


def run_scaling(sizes=DEFAULT_SIZES, repeats=3, iters=20) -> list:
    """One :class:`TimingRow` per ``(n, p)`` pair, in input order."""
    return [time_instance(n, p, repeats=repeats, iters=iters) for n, p in sizes]


def to_csv(rows, path=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f.name for f in fields(TimingRow)])
    for r in rows:
        w.writerow([f"{v:.6g}" if isinstance(v, float) else v for v in astuple(r)])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def main(argv=None):
    import argparse

    ap = argparse.ArgumentParser(description="ADMM cost scaling table (CSV)")
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--iters", type=int, default=20)
    ap.add_argument("--output")
    args = ap.parse_args(argv)
    text = to_csv(run_scaling(repeats=args.repeats, iters=args.iters), args.output)
    if args.output is None:
        print(text, end="")


if __name__ == "__main__":
    main()
