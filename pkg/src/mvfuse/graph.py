"""k-nearest-neighbour fusion graph under the Gower distance."""

from __future__ import annotations

import threading
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.linalg import cho_factor, cho_solve
from scipy.spatial.distance import cdist

from .errors import DegenerateDatasetWarning, DimensionMismatch, FactorizationFailure, ValidationError


def feature_ranges(dataset) -> np.ndarray:
    """Per-column range ``max - min`` of the concatenated data."""
    X = dataset.X
    return X.max(axis=0) - X.min(axis=0)


def gower_feature_distance(dataset, i, i_prime, v, j) -> float:
    """Range-normalized distance between samples ``i`` and ``i_prime`` on
    feature ``j`` of view ``v``. Constant columns contribute 0."""
    col = dataset.views[v].matrix[:, j]
    rng = col.max() - col.min()
    if rng == 0:
        return 0.0
    return float(abs(col[i] - col[i_prime]) / rng)


def aggregate_gower(dataset, i, i_prime) -> float:
    """Mean of :func:`gower_feature_distance` over all ``p`` features."""
    total = 0.0
    for v, view in enumerate(dataset.views):
        for j in range(view.p):
            total += gower_feature_distance(dataset, i, i_prime, v, j)
    return total / dataset.p


def gower_matrix(dataset) -> np.ndarray:
    """All pairwise aggregate Gower distances as an ``n x n`` matrix."""
    rng = feature_ranges(dataset)
    scale = np.where(rng > 0, rng, 1.0)
    Z = np.where(rng > 0, dataset.X / scale, 0.0)
    return cdist(Z, Z, metric="cityblock") / dataset.p


class CachedFactorization:
    """Cholesky factor of ``3 I + D^T D`` shared by every view and iteration."""

    #: total factorizations performed in this process
    count = 0
    _count_lock = threading.Lock()

    def __init__(self, gram):
        n = gram.shape[0]
        M = 3.0 * np.eye(n) + gram
        try:
            self._factor = cho_factor(M, lower=True, check_finite=True)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise FactorizationFailure(str(exc)) from exc
        self.M = M
        with CachedFactorization._count_lock:
            CachedFactorization.count += 1

    def solve(self, rhs):
        return cho_solve(self._factor, rhs, check_finite=False)


@dataclass(frozen=True, eq=False)
class FusionGraph:
    """Edge set, fusion weights and signed difference operator.

    Edges are pairs ``(i, i_prime)`` with ``i < i_prime`` (0-based), sorted
    lexicographically; row ``k`` of ``D`` has ``+1`` at ``i`` and ``-1`` at
    ``i_prime``.
    """

    n: int
    edges: np.ndarray
    weights: np.ndarray
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.intp).reshape(-1, 2)
        weights = np.asarray(self.weights, dtype=float).ravel()
        if weights.shape[0] != edges.shape[0]:
            raise DimensionMismatch("one weight per edge required")
        if edges.size and (np.any(edges[:, 0] >= edges[:, 1]) or edges.min() < 0
                           or edges.max() >= self.n):
            raise ValidationError("edges must satisfy 0 <= i < i_prime < n")
        if np.any(weights <= 0):
            raise ValidationError("fusion weights must be positive")
        if len({tuple(e) for e in edges.tolist()}) != len(edges):
            raise ValidationError("duplicate edges")
        edges.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "weights", weights)

    @property
    def n_edges(self) -> int:
        return self.edges.shape[0]

    @cached_property
    def D(self) -> sp.csr_matrix:
        m = self.n_edges
        rows = np.repeat(np.arange(m), 2)
        cols = self.edges.ravel()
        vals = np.tile([1.0, -1.0], m)
        return sp.csr_matrix((vals, (rows, cols)), shape=(m, self.n))

    @cached_property
    def DT(self) -> sp.csr_matrix:
        return self.D.T.tocsr()

    @cached_property
    def gram(self) -> np.ndarray:
        """Dense ``D^T D``, the unweighted graph Laplacian."""
        G = (self.D.T @ self.D).toarray()
        G.setflags(write=False)
        return G

    def factorization(self) -> CachedFactorization:
        """Factor of ``3 I + D^T D``, computed on first use only."""
        with self._lock:
            fac = self.__dict__.get("_factorization")
            if fac is None:
                fac = CachedFactorization(self.gram)
                self.__dict__["_factorization"] = fac
        return fac

    def apply_D(self, U) -> np.ndarray:
        U = np.asarray(U, dtype=float)
        if U.ndim != 2 or U.shape[0] != self.n:
            raise DimensionMismatch(f"expected {self.n} rows, got shape {U.shape}")
        return U[self.edges[:, 0]] - U[self.edges[:, 1]]

    def apply_D_transpose(self, Y) -> np.ndarray:
        Y = np.asarray(Y, dtype=float)
        if Y.ndim != 2 or Y.shape[0] != self.n_edges:
            raise DimensionMismatch(f"expected {self.n_edges} rows, got shape {Y.shape}")
        return np.asarray(self.DT @ Y)


def build_graph(dataset, k_neighbors: int = 5, phi: float = 1.0) -> FusionGraph:
    """Union of the ``k_neighbors``-nearest-neighbour relations.

    Neighbours are ranked by aggregate Gower distance, ties going to the
    smaller sample index. Each edge gets weight ``exp(-phi * gower)``.
    """
    n = dataset.n
    K = int(k_neighbors)
    if not 1 <= K <= n - 1:
        raise ValidationError(f"k_neighbors must lie in [1, {n - 1}], got {k_neighbors}")
    if not phi > 0:
        raise ValidationError("phi must be positive")
    G = gower_matrix(dataset)
    if not np.any(G > 0):
        warnings.warn("all samples are identical; neighbours chosen by index order",
                      DegenerateDatasetWarning, stacklevel=2)

    pairs = set()
    for i in range(n):
        order = np.argsort(G[i], kind="stable")
        order = order[order != i][:K]
        for j in order.tolist():
            pairs.add((min(i, j), max(i, j)))
    edges = np.array(sorted(pairs), dtype=np.intp).reshape(-1, 2)
    weights = np.exp(-phi * G[edges[:, 0], edges[:, 1]])
    return FusionGraph(n=n, edges=edges, weights=weights)
