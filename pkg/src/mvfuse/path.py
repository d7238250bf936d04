"""Regularization paths and grid search over (beta, theta, sigma) x eta."""

from __future__ import annotations

import logging
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .admm import solve
from .errors import ConvergenceWarning, NoSelection, ValidationError
from .extract import components
from .metrics import all_metrics

log = logging.getLogger(__name__)

DEFAULT_THETA_GRID = tuple(2.0 ** k for k in range(-8, 1))
DEFAULT_SIGMA_GRID = tuple(round(0.1 * k, 1) for k in range(1, 16))
DEFAULT_N_ETA = 50
DEFAULT_N_BETA = 20
PROBE_LIMIT = 40


def _check_grid(name, grid, low=0.0, high=None, allow_low=True):
    grid = [float(x) for x in grid]
    if not grid:
        raise ValidationError(f"{name} grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValidationError(f"{name} grid must be strictly increasing")
    if grid[0] < low or (not allow_low and grid[0] == low):
        raise ValidationError(f"{name} grid values must be {'>=' if allow_low else '>'} {low}")
    if high is not None and grid[-1] > high:
        raise ValidationError(f"{name} grid values must be <= {high}")
    return tuple(grid)


@dataclass(frozen=True)
class PathSpec:
    """Grids for a sweep. ``None`` grids are filled in by :func:`resolve_spec`."""

    eta_grid: Optional[Sequence[float]] = None
    beta_grid: Optional[Sequence[float]] = None
    theta_grid: Sequence[float] = DEFAULT_THETA_GRID
    sigma_grid: Sequence[float] = DEFAULT_SIGMA_GRID
    target_clusters: Optional[int] = None

    def __post_init__(self):
        if self.eta_grid is not None:
            object.__setattr__(self, "eta_grid", _check_grid("eta", self.eta_grid))
        if self.beta_grid is not None:
            object.__setattr__(self, "beta_grid", _check_grid("beta", self.beta_grid))
        object.__setattr__(self, "theta_grid", _check_grid("theta", self.theta_grid, 0.0, 1.0))
        object.__setattr__(self, "sigma_grid",
                           _check_grid("sigma", self.sigma_grid, 0.0, allow_low=False))
        if self.target_clusters is not None and int(self.target_clusters) < 1:
            raise ValidationError("target_clusters must be a positive integer")


@dataclass
class PathRecord:
    eta: float
    beta: float
    theta: float
    sigma: float
    n_clusters: Optional[int] = None
    n_selected: Optional[list] = None
    selected_features: Optional[list] = None
    labels: Optional[np.ndarray] = None
    metrics: Optional[dict] = None
    iterations: int = 0
    converged: bool = False
    error: Optional[str] = None
    objective_trace: Optional[list] = field(default=None, repr=False)


@dataclass
class PathResult:
    records: list = field(default_factory=list)
    best: Optional[int] = None

    @property
    def total_iterations(self) -> int:
        return sum(r.iterations for r in self.records)

    def cluster_counts(self) -> list:
        return [r.n_clusters for r in self.records]


def _quiet_solve(dataset, graph, params, warm_start=None):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        return solve(dataset, graph, params, warm_start=warm_start)


def _record(params, result, truth):
    rec = PathRecord(
        eta=params.eta, beta=params.beta, theta=params.theta, sigma=params.sigma,
        n_clusters=result.n_clusters, n_selected=result.n_selected,
        selected_features=[s.tolist() for s in result.selected_features],
        labels=result.labels, iterations=result.iterations, converged=result.converged,
        objective_trace=result.objective_trace,
    )
    if truth is not None:
        rec.metrics = all_metrics(truth, result.labels)
    return rec


def eta_path(dataset, graph, params, eta_grid, truth=None, warm_start=True) -> PathResult:
    """Solve along an increasing ``eta`` grid.

    Each point starts from the previous solution with its multipliers reset
    to zero (or from scratch when ``warm_start`` is false). Solver failures
    are recorded on the point and the sweep continues cold.
    """
    eta_grid = _check_grid("eta", eta_grid)
    out = PathResult()
    prev = None
    for eta in eta_grid:
        p = params.replace(eta=eta)
        try:
            seed = prev.with_zero_multipliers() if (warm_start and prev is not None) else None
            state, result = _quiet_solve(dataset, graph, p, warm_start=seed)
        except ArithmeticError as exc:
            log.warning("solve failed at eta=%g: %s", eta, exc)
            out.records.append(PathRecord(eta=eta, beta=p.beta, theta=p.theta, sigma=p.sigma,
                                          error=f"{type(exc).__name__}: {exc}"))
            prev = None
            continue
        out.records.append(_record(p, result, truth))
        prev = state
    return out


def _doubling_probe(fits, start=1.0):
    """Smallest power of two (from ``start`` upward) for which ``fits`` holds."""
    val = start
    for _ in range(PROBE_LIMIT):
        if fits(val):
            return val
        val *= 2.0
    raise NoSelection(f"doubling probe did not terminate below {val:g}")


def graph_components(graph) -> int:
    """Number of connected components of the fusion graph.

    Fusion never merges across components, so this is the fewest clusters
    any ``eta`` can produce.
    """
    return components(graph.n, graph.edges, np.ones(graph.n_edges, dtype=bool))[1]


def default_eta_grid(dataset, graph, params, n_points=DEFAULT_N_ETA):
    """Log grid over ``[eta_max / 1000, eta_max]``, where ``eta_max`` is the
    smallest power of two at which a cold solve is fully fused (one cluster
    per connected component of the graph, i.e. one cluster when connected)."""
    floor = graph_components(graph)

    def fully_fused(eta):
        return _quiet_solve(dataset, graph, params.replace(eta=eta))[1].n_clusters <= floor
    eta_max = _doubling_probe(fully_fused)
    return tuple(np.geomspace(eta_max / 1e3, eta_max, n_points))


def default_beta_grid(dataset, graph, params, n_points=DEFAULT_N_BETA):
    """Log grid from full support down to empty support.

    ``beta_max`` is the smallest power of two at which nothing is selected;
    the grid spans ``[beta_max / 1000, beta_max]``.
    """
    def empty(beta):
        res = _quiet_solve(dataset, graph, params.replace(beta=beta))[1]
        return sum(res.n_selected) == 0
    beta_max = _doubling_probe(empty)
    return tuple(np.geomspace(beta_max / 1e3, beta_max, n_points))


def resolve_spec(dataset, graph, params, spec: PathSpec) -> PathSpec:
    from dataclasses import replace
    eta_grid = spec.eta_grid or default_eta_grid(dataset, graph, params)
    beta_grid = spec.beta_grid or default_beta_grid(dataset, graph, params)
    return replace(spec, eta_grid=eta_grid, beta_grid=beta_grid)


def thread_count() -> int:
    raw = os.environ.get("MVFUSE_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        val = int(raw)
    except ValueError:
        raise ValidationError(f"MVFUSE_THREADS must be a positive integer, got {raw!r}") from None
    if val < 1:
        raise ValidationError(f"MVFUSE_THREADS must be a positive integer, got {raw!r}")
    return val


def select_best(records, truth_given, target_clusters=None):
    """Index of the preferred record.

    With ground truth: highest ARI, then fewer selected features, then
    smaller ``eta``. Without: the smallest ``eta`` whose cluster count equals
    ``target_clusters``.
    """
    ok = [(k, r) for k, r in enumerate(records) if r.error is None]
    if truth_given:
        if not ok:
            raise NoSelection("every grid point failed")
        return min(ok, key=lambda kr: (-kr[1].metrics["ari"], sum(kr[1].n_selected), kr[1].eta, kr[0]))[0]
    if target_clusters is None:
        raise NoSelection("no ground truth and no target cluster count given")
    hits = [(k, r) for k, r in ok if r.n_clusters == target_clusters]
    if not hits:
        raise NoSelection(f"no grid point yields {target_clusters} clusters")
    return min(hits, key=lambda kr: (kr[1].eta, kr[0]))[0]


def grid_search(dataset, graph, base_params, spec: PathSpec, truth=None, threads=None) -> PathResult:
    """Cartesian sweep of ``(beta, theta, sigma)`` cells, each an ``eta`` path.

    Cells run concurrently on up to ``threads`` workers (default from
    ``MVFUSE_THREADS``); records come back in grid order regardless.
    """
    spec = resolve_spec(dataset, graph, base_params, spec)
    if truth is not None:
        truth = np.asarray(truth)
        if truth.shape != (dataset.n,):
            raise ValidationError(f"truth must have {dataset.n} labels")
    graph.factorization()
    cells = [(b, th, sg) for b in spec.beta_grid for th in spec.theta_grid for sg in spec.sigma_grid]

    def run_cell(cell):
        b, th, sg = cell
        p = base_params.replace(beta=b, theta=th, sigma=sg)
        return eta_path(dataset, graph, p, spec.eta_grid, truth=truth).records

    threads = thread_count() if threads is None else threads
    if threads > 1 and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(run_cell, cells))
    else:
        chunks = [run_cell(c) for c in cells]
    out = PathResult(records=[r for chunk in chunks for r in chunk])
    try:
        out.best = select_best(out.records, truth is not None, spec.target_clusters)
    except NoSelection as exc:
        if truth is not None or spec.target_clusters is not None:
            exc.result = out
            raise
    return out
