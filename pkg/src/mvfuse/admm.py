"""Two-block ADMM for multi-view fusion clustering with group sparsity.

The model is::

    sum_v zeta_v * loss_v(X^v, U^v)
      + eta * sum_k w_k * ||(D U)_k||_2
      + beta * ((1 - theta) * inter(U - Xbar) + theta * intra(U - Xbar))

and is split with the constraints ``U = B``, ``D U = E``, ``U - Xbar = F``
and ``U - Xbar = Fbar``. The first block ``(B, F, Fbar, E)`` and the
multiplier block are updated by closed-form proxes; the ``U`` block is a
linear solve against ``3 I + D^T D`` whose Cholesky factor is cached on the
graph.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field, fields
from typing import Optional

import numpy as np

from .data import ClusteringResult
from .errors import ConvergenceWarning, DimensionMismatch, NonFiniteIterate
from .extract import extract_feature_support, extract_partition
from .losses import loss_prox, loss_value
from .penalties import (
    inter_prox,
    inter_value,
    intra_prox,
    intra_value,
    penalty_family,
    prox_fusion_rows,
)

log = logging.getLogger(__name__)


@dataclass
class SolverState:
    U: np.ndarray
    B: np.ndarray
    E: np.ndarray
    F: np.ndarray
    Fbar: np.ndarray
    Q: np.ndarray
    P: np.ndarray
    G: np.ndarray
    Gbar: np.ndarray
    t: int = 0
    primal_residual: float = 0.0
    dual_residual: float = 0.0
    converged: bool = False
    objective_trace: list = field(default_factory=list)
    residual_trace: list = field(default_factory=list)
    DU: Optional[np.ndarray] = field(default=None, repr=False)

    _ARRAYS = ("U", "B", "E", "F", "Fbar", "Q", "P", "G", "Gbar")

    def copy(self) -> "SolverState":
        kw = {f.name: getattr(self, f.name) for f in fields(self)}
        for name in self._ARRAYS:
            kw[name] = kw[name].copy()
        kw["objective_trace"] = list(self.objective_trace)
        kw["residual_trace"] = list(self.residual_trace)
        kw["DU"] = None
        return SolverState(**kw)

    def with_zero_multipliers(self) -> "SolverState":
        out = self.copy()
        for name in ("Q", "P", "G", "Gbar"):
            getattr(out, name)[...] = 0.0
        return out


def initialize(dataset, graph, params=None, warm_start: Optional[SolverState] = None) -> SolverState:
    """Starting point ``U = X`` with every constraint satisfied exactly.

    With ``warm_start`` the given state is copied (multipliers included) and
    its counters and traces are reset.
    """
    n, p = dataset.n, dataset.p
    if warm_start is not None:
        if warm_start.U.shape != (n, p) or warm_start.E.shape != (graph.n_edges, p):
            raise DimensionMismatch("warm start does not match dataset and graph")
        state = warm_start.copy()
        state.t = 0
        state.converged = False
        state.objective_trace = []
        state.residual_trace = []
        return state
    U = np.array(dataset.X, dtype=float, copy=True)
    C = U - dataset.Xbar
    m = graph.n_edges
    return SolverState(
        U=U, B=U.copy(), E=graph.apply_D(U), F=C.copy(), Fbar=C.copy(),
        Q=np.zeros((n, p)), P=np.zeros((m, p)), G=np.zeros((n, p)), Gbar=np.zeros((n, p)),
    )


def update_B(state, dataset, sigma) -> np.ndarray:
    B = np.empty_like(state.U)
    for view, sl in zip(dataset.views, dataset.slices):
        A = state.U[:, sl] + state.Q[:, sl] / sigma
        B[:, sl] = loss_prox(view.loss_kind, view.matrix, A, view.view_weight / sigma)
    return B


def update_F(state, dataset, sigma, params) -> np.ndarray:
    fam = penalty_family(params.penalty_family)
    tau = params.beta * (1.0 - params.theta) / sigma
    F = np.empty_like(state.U)
    for view, sl in zip(dataset.views, dataset.slices):
        A = state.U[:, sl] - dataset.Xbar[:, sl] + state.G[:, sl] / sigma
        F[:, sl] = inter_prox(fam.inter, A, view.feature_weights, tau)
    return F


def update_Fbar(state, dataset, sigma, params) -> np.ndarray:
    fam = penalty_family(params.penalty_family)
    tau = params.beta * params.theta / sigma
    Fbar = np.empty_like(state.U)
    for sl in dataset.slices:
        A = state.U[:, sl] - dataset.Xbar[:, sl] + state.Gbar[:, sl] / sigma
        Fbar[:, sl] = intra_prox(fam.intra, A, tau)
    return Fbar


def _DU(state, graph):
    if state.DU is None:
        state.DU = graph.apply_D(state.U)
    return state.DU


def update_E(state, graph, sigma, eta) -> np.ndarray:
    A = _DU(state, graph) + state.P / sigma
    return prox_fusion_rows(A, graph.weights, eta / sigma)


def update_U(state, dataset, graph, sigma) -> np.ndarray:
    """Solve ``(3 I + D^T D) U = rhs`` for all views at once.

    The columns never couple, so one multi-column solve equals the per-view
    solves.
    """
    Xbar = dataset.Xbar
    rhs = (state.B - state.Q / sigma
           + graph.apply_D_transpose(state.E - state.P / sigma)
           + (Xbar + state.F - state.G / sigma)
           + (Xbar + state.Fbar - state.Gbar / sigma))
    return graph.factorization().solve(rhs)


def update_multipliers(state, dataset, graph, sigma):
    """Return updated ``(Q, P, G, Gbar)`` for the current primal iterate."""
    C = state.U - dataset.Xbar
    Q = state.Q + sigma * (state.U - state.B)
    P = state.P + sigma * (_DU(state, graph) - state.E)
    G = state.G + sigma * (C - state.F)
    Gbar = state.Gbar + sigma * (C - state.Fbar)
    return Q, P, G, Gbar


def objective(dataset, graph, params, U, F=None, Fbar=None, DU=None) -> float:
    """Model objective at ``U``.

    Count penalties (``group_l0``, ``l0``) are evaluated on the slacks ``F``
    and ``Fbar`` when given, since those carry the exact zeros; everything
    else is evaluated at ``U``.
    """
    fam = penalty_family(params.penalty_family)
    val = 0.0
    for view, sl in zip(dataset.views, dataset.slices):
        val += view.view_weight * loss_value(view.loss_kind, view.matrix, U[:, sl])
    if params.eta > 0 and graph.n_edges:
        DU = graph.apply_D(U) if DU is None else DU
        val += params.eta * float(np.dot(graph.weights, np.linalg.norm(DU, axis=1)))
    if params.beta > 0:
        C = U - dataset.Xbar
        inter_arg = F if (F is not None and fam.inter == "group_l0") else C
        intra_arg = Fbar if (Fbar is not None and fam.intra == "l0") else C
        inter = sum(inter_value(fam.inter, inter_arg[:, sl], v.feature_weights)
                    for v, sl in zip(dataset.views, dataset.slices))
        intra = intra_value(fam.intra, intra_arg)
        val += params.beta * ((1.0 - params.theta) * inter + params.theta * intra)
    return val


def _norm2(*arrays):
    total = 0.0
    for a in arrays:
        flat = a.ravel(order="K")
        total += float(np.dot(flat, flat))
    return total


def step(state, dataset, graph, params) -> SolverState:
    """One full ADMM iteration; returns a new state with residuals filled in."""
    sigma = params.sigma
    B = update_B(state, dataset, sigma)
    F = update_F(state, dataset, sigma, params)
    Fbar = update_Fbar(state, dataset, sigma, params)
    E = update_E(state, graph, sigma, params.eta)

    nxt = SolverState(U=state.U, B=B, E=E, F=F, Fbar=Fbar,
                      Q=state.Q, P=state.P, G=state.G, Gbar=state.Gbar,
                      t=state.t + 1, objective_trace=state.objective_trace,
                      residual_trace=state.residual_trace)
    nxt.U = update_U(nxt, dataset, graph, sigma)
    if not np.all(np.isfinite(nxt.U)):
        raise NonFiniteIterate(f"non-finite centroids at iteration {nxt.t}")
    DU = nxt.DU = graph.apply_D(nxt.U)
    nxt.Q, nxt.P, nxt.G, nxt.Gbar = update_multipliers(nxt, dataset, graph, sigma)

    C = nxt.U - dataset.Xbar
    nxt.primal_residual = math.sqrt(_norm2(nxt.U - B, DU - E, C - F, C - Fbar))
    nxt.dual_residual = sigma * math.sqrt(_norm2(
        B - state.B, graph.apply_D_transpose(E - state.E), F - state.F, Fbar - state.Fbar))
    return nxt


def tolerances(state, dataset, graph, params):
    """Primal and dual stopping thresholds for the current iterate."""
    n, p, m = dataset.n, dataset.p, graph.n_edges
    C = state.U - dataset.Xbar
    DU = _DU(state, graph)
    ax = math.sqrt(_norm2(state.U, DU, C, C))
    bz = math.sqrt(_norm2(state.B, state.E, state.F, state.Fbar))
    y = math.sqrt(_norm2(state.Q, state.P, state.G, state.Gbar))
    eps_pri = math.sqrt(3 * n * p + m * p) * params.eps_abs + params.eps_rel * max(ax, bz)
    eps_dual = math.sqrt(4 * n * p) * params.eps_abs + params.eps_rel * y
    return eps_pri, eps_dual


def run(dataset, graph, params, warm_start=None, callback=None) -> SolverState:
    """Iterate until both residual tests pass or ``params.max_iter`` is hit."""
    params.check_against(dataset)
    if graph.n != dataset.n:
        raise DimensionMismatch("graph and dataset disagree on n")
    state = initialize(dataset, graph, params, warm_start)
    graph.factorization()
    for _ in range(params.max_iter):
        state = step(state, dataset, graph, params)
        obj = objective(dataset, graph, params, state.U, state.F, state.Fbar, state.DU)
        state.objective_trace.append(obj)
        state.residual_trace.append((state.primal_residual, state.dual_residual))
        if callback is not None:
            callback(state.t, obj, state.primal_residual, state.dual_residual)
        eps_pri, eps_dual = tolerances(state, dataset, graph, params)
        if state.primal_residual <= eps_pri and state.dual_residual <= eps_dual:
            state.converged = True
            break
    if not state.converged:
        warnings.warn(f"ADMM stopped at max_iter={params.max_iter} before converging "
                      f"(r={state.primal_residual:.3g}, s={state.dual_residual:.3g})",
                      ConvergenceWarning, stacklevel=2)
    log.debug("ADMM finished: t=%d converged=%s r=%.3g s=%.3g", state.t, state.converged,
              state.primal_residual, state.dual_residual)
    return state


def make_result(state, dataset, graph, params) -> ClusteringResult:
    labels, k = extract_partition(state, graph, params)
    selected, masks = extract_feature_support(state, dataset, params)
    return ClusteringResult(
        labels=labels, n_clusters=k, selected_features=selected, support_mask=masks,
        U=state.U.copy(), iterations=state.t, converged=state.converged,
        primal_residual=state.primal_residual, dual_residual=state.dual_residual,
        objective_trace=list(state.objective_trace), hyperparams=params,
    )


def solve(dataset, graph, params, warm_start=None, callback=None):
    """Run the solver and extract the clustering.

    Returns
    -------
    state : SolverState
    result : ClusteringResult
        ``result.converged`` is ``False`` when ``max_iter`` was reached; the
        result is still usable.
    """
    state = run(dataset, graph, params, warm_start=warm_start, callback=callback)
    return state, make_result(state, dataset, graph, params)
