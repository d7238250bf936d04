"""Per-view data-fitting losses, their loss-specific centers and proxes.

Three losses are supported, keyed by the tags used in configuration files:

``gaussian``
    ``0.5 * ||X - U||_F^2``
``manhattan``
    ``sum_ij |X_ij - U_ij|``
``bernoulli``
    ``sum_ij log(1 + exp(U_ij)) - X_ij * U_ij`` (``U`` is the natural parameter)

All three are separable over entries, so every prox is computed entrywise.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit, logit

from .errors import DimensionMismatch, NonPositiveTau

LOSS_KINDS = ("gaussian", "manhattan", "bernoulli")

#: clamp applied to Bernoulli column means before taking the logit
BERNOULLI_CLAMP = 1e-6


def _check_kind(kind):
    if kind not in LOSS_KINDS:
        raise ValueError(f"unknown loss kind {kind!r}; expected one of {LOSS_KINDS}")


def _check_shapes(X, U):
    if X.shape != U.shape:
        raise DimensionMismatch(f"shape mismatch: {X.shape} vs {U.shape}")


def loss_value(kind: str, X, U) -> float:
    """Evaluate the loss ``kind`` between data ``X`` and centroids ``U``."""
    _check_kind(kind)
    X = np.asarray(X, dtype=float)
    U = np.asarray(U, dtype=float)
    _check_shapes(X, U)
    if kind == "gaussian":
        return 0.5 * float(np.sum((X - U) ** 2))
    if kind == "manhattan":
        return float(np.sum(np.abs(X - U)))
    return float(np.sum(np.logaddexp(0.0, U) - X * U))


def loss_center(kind: str, X) -> np.ndarray:
    """Column-constant minimizer of the loss, one value per column.

    Column means for ``gaussian``, column medians for ``manhattan`` (mean of
    the two middle values when ``n`` is even) and the logit of the clamped
    column mean for ``bernoulli``.
    """
    _check_kind(kind)
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 1:
        raise DimensionMismatch("loss_center expects a non-empty 2-D array")
    if kind == "gaussian":
        return X.mean(axis=0)
    if kind == "manhattan":
        return np.median(X, axis=0)
    mean = np.clip(X.mean(axis=0), BERNOULLI_CLAMP, 1.0 - BERNOULLI_CLAMP)
    return logit(mean)


def _bernoulli_prox(x, a, tau, tol=1e-12, max_iter=200):
    # root of g(b) = tau * (sigmoid(b) - x) + b - a; g is increasing with g' >= 1
    # and the root lies in [a - tau, a + tau] because |sigmoid(b) - x| <= 1.
    lo = a - tau
    hi = a + tau
    b = a.copy()
    for _ in range(max_iter):
        s = expit(b)
        g = tau * (s - x) + b - a
        lo = np.where(g < 0, b, lo)
        hi = np.where(g > 0, b, hi)
        step = g / (1.0 + tau * s * (1.0 - s))
        b_new = b - step
        outside = (b_new <= lo) | (b_new >= hi)
        b_new = np.where(outside & (g != 0), 0.5 * (lo + hi), b_new)
        b_new = np.where(g == 0, b, b_new)
        done = np.max(np.abs(b_new - b), initial=0.0) <= tol
        b = b_new
        if done or np.max(hi - lo, initial=0.0) <= tol:
            break
    return b


def loss_prox(kind: str, X, A, tau) -> np.ndarray:
    """Proximal map ``argmin_B tau * loss(X, B) + 0.5 * ||B - A||_F^2``.

    Parameters
    ----------
    kind : str
        Loss tag.
    X : array_like
        Observed data, same shape as ``A``.
    A : array_like
        Prox argument.
    tau : float
        Positive step; may also be an array broadcastable against ``A``.

    Returns
    -------
    ndarray
        The minimizer, same shape as ``A``. The Bernoulli case has no algebraic
        closed form and is solved entrywise by safeguarded Newton iteration to
        an absolute accuracy of ``1e-12``.
    """
    _check_kind(kind)
    X = np.asarray(X, dtype=float)
    A = np.asarray(A, dtype=float)
    _check_shapes(X, A)
    tau = np.asarray(tau, dtype=float)
    if np.any(~(tau > 0)):
        raise NonPositiveTau(f"loss prox step must be positive, got {tau}")
    if kind == "gaussian":
        return (A + tau * X) / (1.0 + tau)
    if kind == "manhattan":
        R = A - X
        return X + np.sign(R) * np.maximum(np.abs(R) - tau, 0.0)
    tau_b = np.broadcast_to(tau, A.shape).astype(float)
    return _bernoulli_prox(X, A, tau_b)
