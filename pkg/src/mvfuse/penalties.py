"""Proximal operators of the fusion and sparsity penalties.

Every prox accepts a step ``tau >= 0``; ``tau == 0`` is the identity and a
negative step raises :class:`~mvfuse.errors.NonPositiveTau`. Hard-threshold
ties (magnitude exactly at the threshold) resolve to zero.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import NonPositiveTau, ValidationError


class PenaltyFamily(NamedTuple):
    inter: str
    intra: str

    @property
    def convex(self) -> bool:
        return self.inter != "group_l0" and self.intra != "l0"


_FAMILIES = {
    "group_l0_l0": PenaltyFamily("group_l0", "l0"),
    "group_lasso_l1": PenaltyFamily("group_lasso", "l1"),
    "group_l0_only": PenaltyFamily("group_l0", "none"),
    "l0_only": PenaltyFamily("none", "l0"),
    "none": PenaltyFamily("none", "none"),
}


def penalty_family(name: str) -> PenaltyFamily:
    try:
        return _FAMILIES[name]
    except KeyError:
        raise ValidationError(f"unknown penalty family {name!r}") from None


def _check_tau(tau):
    if isinstance(tau, float):  # fast path for the solver's scalar steps
        if not (0.0 <= tau < math.inf):
            raise NonPositiveTau(f"prox step must be finite and >= 0, got {tau}")
        return tau
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0) or not np.all(np.isfinite(tau)):
        raise NonPositiveTau(f"prox step must be finite and >= 0, got {tau}")
    return tau


def _group_shrink(norms, thresh):
    # 1 - t / max(norm, t), with the 0/0 case (t == 0, zero group) mapped to 1
    denom = np.maximum(norms, thresh)
    safe = np.where(denom > 0, denom, 1.0)
    return np.where(denom > 0, 1.0 - thresh / safe, 1.0)


def prox_fusion_rows(A, weights, tau) -> np.ndarray:
    """Row-wise group soft-threshold at ``tau * weights[k]`` for row ``k``."""
    A = np.asarray(A, dtype=float)
    thresh = _check_tau(tau) * np.asarray(weights, dtype=float)
    thresh = np.broadcast_to(thresh, (A.shape[0],))
    scale = _group_shrink(np.linalg.norm(A, axis=1), thresh)
    return A * scale[:, None]


def prox_group_lasso_columns(A, col_weights, tau) -> np.ndarray:
    """Column-wise group soft-threshold at ``tau * col_weights[j]``."""
    A = np.asarray(A, dtype=float)
    thresh = _check_tau(tau) * np.asarray(col_weights, dtype=float)
    thresh = np.broadcast_to(thresh, (A.shape[1],))
    scale = _group_shrink(np.linalg.norm(A, axis=0), thresh)
    return A * scale[None, :]


def prox_group_l0_columns(A, col_weights, tau) -> np.ndarray:
    """Keep column ``j`` iff ``||A[:, j]||_2 > sqrt(2 * tau * col_weights[j])``.

    This is the prox of the weighted count ``sum_j w_j * 1(A[:, j] != 0)``.
    """
    A = np.asarray(A, dtype=float)
    thresh_sq = 2.0 * _check_tau(tau) * np.asarray(col_weights, dtype=float)
    keep = np.sum(A * A, axis=0) > thresh_sq
    return np.where(keep[None, :], A, 0.0)


def prox_l0_elements(A, tau) -> np.ndarray:
    """Entrywise hard threshold: keep ``a`` iff ``|a| > sqrt(2 tau)``."""
    A = np.asarray(A, dtype=float)
    tau = _check_tau(tau)
    return np.where(A * A > 2.0 * tau, A, 0.0)


def prox_l1_elements(A, tau) -> np.ndarray:
    """Entrywise soft threshold at ``tau``."""
    A = np.asarray(A, dtype=float)
    tau = _check_tau(tau)
    return np.sign(A) * np.maximum(np.abs(A) - tau, 0.0)


def inter_prox(kind, A, col_weights, tau):
    if kind == "none" or np.all(np.asarray(tau) == 0):
        return np.array(A, dtype=float, copy=True)
    if kind == "group_l0":
        return prox_group_l0_columns(A, col_weights, tau)
    if kind == "group_lasso":
        return prox_group_lasso_columns(A, col_weights, tau)
    raise ValidationError(f"unknown inter-group penalty {kind!r}")


def intra_prox(kind, A, tau):
    if kind == "none" or np.all(np.asarray(tau) == 0):
        return np.array(A, dtype=float, copy=True)
    if kind == "l0":
        return prox_l0_elements(A, tau)
    if kind == "l1":
        return prox_l1_elements(A, tau)
    raise ValidationError(f"unknown intra-group penalty {kind!r}")


def inter_value(kind, A, col_weights) -> float:
    A = np.asarray(A, dtype=float)
    if kind == "none":
        return 0.0
    norms = np.linalg.norm(A, axis=0)
    if kind == "group_l0":
        return float(np.sum(np.asarray(col_weights) * (norms != 0)))
    return float(np.sum(np.asarray(col_weights) * norms))


def intra_value(kind, A) -> float:
    A = np.asarray(A, dtype=float)
    if kind == "none":
        return 0.0
    if kind == "l0":
        return float(np.count_nonzero(A))
    return float(np.sum(np.abs(A)))
