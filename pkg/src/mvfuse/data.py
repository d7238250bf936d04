"""Dataset, hyperparameter and result containers."""

from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DomainViolation,
    EmptyInput,
    MismatchedSampleCount,
    NonFiniteEntry,
    ValidationError,
    ViewWeightWarning,
)
from .losses import LOSS_KINDS, loss_center

PENALTY_FAMILIES = ("group_l0_l0", "group_lasso_l1", "group_l0_only", "l0_only", "none")
MERGE_MODES = ("exact_zero_on_E", "tolerance_on_DU")


def _frozen(a):
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class View:
    """One feature block observed on the shared samples.

    ``view_weight`` may be left as ``None``; :func:`assemble_dataset` then
    fills in ``1/V``.
    """

    matrix: np.ndarray
    loss_kind: str = "gaussian"
    view_weight: Optional[float] = None
    feature_weights: Optional[np.ndarray] = None
    name: Optional[str] = None

    def __post_init__(self):
        X = np.asarray(self.matrix, dtype=float)
        if X.ndim != 2:
            raise DimensionMismatch(f"view matrix must be 2-D, got shape {X.shape}")
        n, p = X.shape
        if n < 2 or p < 1:
            raise DimensionMismatch(f"view needs n >= 2 and p >= 1, got {X.shape}")
        if not np.all(np.isfinite(X)):
            raise NonFiniteEntry("view matrix contains non-finite entries")
        if self.loss_kind not in LOSS_KINDS:
            raise ValidationError(f"unknown loss kind {self.loss_kind!r}")
        if self.loss_kind == "bernoulli" and (X.min() < 0.0 or X.max() > 1.0):
            raise DomainViolation("bernoulli view entries must lie in [0, 1]")
        object.__setattr__(self, "matrix", _frozen(X))

        if self.view_weight is not None:
            w = float(self.view_weight)
            if not (w > 0 and math.isfinite(w)):
                raise ValidationError(f"view weight must be positive, got {self.view_weight}")
            object.__setattr__(self, "view_weight", w)

        if self.feature_weights is None:
            fw = np.ones(p)
        else:
            fw = np.asarray(self.feature_weights, dtype=float).ravel()
            if fw.shape != (p,):
                raise DimensionMismatch(f"expected {p} feature weights, got {fw.size}")
            if not np.all(np.isfinite(fw)) or np.any(fw <= 0):
                raise ValidationError("feature weights must be positive and finite")
        object.__setattr__(self, "feature_weights", _frozen(fw))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def p(self) -> int:
        return self.matrix.shape[1]

    @cached_property
    def center(self) -> np.ndarray:
        """Loss-specific center, one value per column."""
        c = loss_center(self.loss_kind, self.matrix)
        c.setflags(write=False)
        return c


@dataclass(frozen=True, eq=False)
class MultiViewDataset:
    views: tuple
    n: int
    p: int

    @property
    def n_views(self) -> int:
        return len(self.views)

    @cached_property
    def slices(self) -> tuple:
        """Column slice of each view inside the concatenated ``n x p`` matrix."""
        out, start = [], 0
        for v in self.views:
            out.append(slice(start, start + v.p))
            start += v.p
        return tuple(out)

    @cached_property
    def X(self) -> np.ndarray:
        return _frozen(np.hstack([v.matrix for v in self.views]))

    @cached_property
    def center_row(self) -> np.ndarray:
        return _frozen(np.concatenate([v.center for v in self.views]))

    @cached_property
    def Xbar(self) -> np.ndarray:
        """Broadcast of the loss-specific centers to ``n`` rows."""
        return _frozen(np.broadcast_to(self.center_row, (self.n, self.p)))

    @cached_property
    def view_weights(self) -> np.ndarray:
        return _frozen([v.view_weight for v in self.views])

    @cached_property
    def feature_weights(self) -> np.ndarray:
        return _frozen(np.concatenate([v.feature_weights for v in self.views]))


def default_view_weights(V: int) -> np.ndarray:
    """Uniform view weights ``1/V``."""
    if V < 1:
        raise ValidationError("need at least one view")
    return np.full(V, 1.0 / V)


def assemble_dataset(views: Sequence[View]) -> MultiViewDataset:
    """Validate a list of views and bundle them into a dataset.

    Views without an explicit weight receive ``1/V``. User-supplied weights
    are kept as given; a :class:`ViewWeightWarning` is emitted when the final
    weights do not sum to one.
    """
    views = list(views)
    if not views:
        raise EmptyInput("at least one view is required")
    n = views[0].n
    for k, v in enumerate(views):
        if not isinstance(v, View):
            raise ValidationError(f"element {k} is not a View")
        if v.n != n:
            raise MismatchedSampleCount(
                f"view {k} has {v.n} samples, view 0 has {n}")

    defaults = default_view_weights(len(views))
    filled = []
    for v, w in zip(views, defaults):
        if v.view_weight is None:
            v = View(v.matrix, v.loss_kind, float(w), v.feature_weights, v.name)
        filled.append(v)
    total = sum(v.view_weight for v in filled)
    if abs(total - 1.0) > 1e-12:
        warnings.warn(f"view weights sum to {total:.6g}, not 1", ViewWeightWarning, stacklevel=2)
    return MultiViewDataset(views=tuple(filled), n=n, p=sum(v.p for v in filled))


@dataclass(frozen=True)
class HyperParams:
    """Model, solver and extraction settings.

    ``eta`` scales the fusion term, ``beta`` the sparsity term and ``theta``
    splits ``beta`` between the column-group part (``1 - theta``) and the
    elementwise part (``theta``). ``phi`` is the decay rate of the fusion
    weights and ``sigma`` the ADMM penalty.
    """

    eta: float = 1.0
    beta: float = 1.0
    theta: float = 0.5
    phi: float = 1.0
    k_neighbors: int = 5
    sigma: float = 1.0
    penalty_family: str = "group_l0_l0"
    eps_abs: float = 1e-5
    eps_rel: float = 1e-4
    max_iter: int = 2000
    merge_mode: str = "exact_zero_on_E"
    merge_tol: float = 1e-6
    support_tol: float = 1e-8

    def __post_init__(self):
        def finite(name):
            val = getattr(self, name)
            if isinstance(val, bool) or not isinstance(val, (int, float, np.floating, np.integer)):
                raise ValidationError(f"{name} must be a number, got {val!r}")
            if not math.isfinite(val):
                raise ValidationError(f"{name} must be finite")
            return val

        for name in ("eta", "beta", "merge_tol", "support_tol"):
            if finite(name) < 0:
                raise ValidationError(f"{name} must be >= 0")
        for name in ("phi", "sigma", "eps_abs", "eps_rel"):
            if not finite(name) > 0:
                raise ValidationError(f"{name} must be > 0")
        if not 0.0 <= finite("theta") <= 1.0:
            raise ValidationError("theta must lie in [0, 1]")
        for name in ("k_neighbors", "max_iter"):
            val = getattr(self, name)
            if (isinstance(val, bool) or not isinstance(val, (int, float, np.integer, np.floating))
                    or not math.isfinite(val) or int(val) != val or val < 1):
                raise ValidationError(f"{name} must be a positive integer")
            object.__setattr__(self, name, int(val))
        if self.penalty_family not in PENALTY_FAMILIES:
            raise ValidationError(f"unknown penalty family {self.penalty_family!r}")
        if self.merge_mode not in MERGE_MODES:
            raise ValidationError(f"unknown merge mode {self.merge_mode!r}")

    def check_against(self, dataset: MultiViewDataset):
        if self.k_neighbors > dataset.n - 1:
            raise ValidationError(
                f"k_neighbors={self.k_neighbors} exceeds n - 1 = {dataset.n - 1}")

    def replace(self, **changes) -> "HyperParams":
        return dataclasses.replace(self, **changes)


@dataclass
class ClusteringResult:
    """Partition and feature selection read off a finished solver run.

    Indices are 0-based here; serialization converts to 1-based.
    ``labels`` take values ``1..n_clusters``.
    """

    labels: np.ndarray
    n_clusters: int
    selected_features: list
    support_mask: list
    U: np.ndarray
    iterations: int
    converged: bool
    primal_residual: float
    dual_residual: float
    objective_trace: list = field(default_factory=list)
    hyperparams: Optional[HyperParams] = None

    @property
    def n_selected(self) -> list:
        return [len(s) for s in self.selected_features]
