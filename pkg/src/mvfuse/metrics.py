"""External clustering indices: ACC, NMI, ARI and FMI."""

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import EmptyInput, LengthMismatch


def contingency(r, c) -> np.ndarray:
    """Counts ``n_ij`` of samples with truth label ``i`` and predicted ``j``."""
    r = np.asarray(r).ravel()
    c = np.asarray(c).ravel()
    if r.shape != c.shape:
        raise LengthMismatch(f"label vectors differ in length: {r.size} vs {c.size}")
    if r.size == 0:
        raise EmptyInput("label vectors are empty")
    _, ri = np.unique(r, return_inverse=True)
    _, ci = np.unique(c, return_inverse=True)
    table = np.zeros((ri.max() + 1, ci.max() + 1), dtype=np.int64)
    np.add.at(table, (ri, ci), 1)
    return table


def _pairs(x):
    x = np.asarray(x, dtype=np.int64)
    return int(np.sum(x * (x - 1) // 2))


def accuracy(r, c) -> float:
    """Fraction of samples matched under the best one-to-one relabeling."""
    table = contingency(r, c)
    rows, cols = linear_sum_assignment(table, maximize=True)
    return float(table[rows, cols].sum()) / table.sum()


def _entropy(counts, n):
    p = counts[counts > 0] / n
    return float(-np.sum(p * np.log(p)))


def nmi(r, c) -> float:
    """Mutual information normalized by the larger of the two entropies."""
    table = contingency(r, c)
    n = table.sum()
    a = table.sum(axis=1)
    b = table.sum(axis=0)
    h_r, h_c = _entropy(a, n), _entropy(b, n)
    if h_r == 0.0 and h_c == 0.0:
        return 1.0
    nz = table > 0
    pij = table[nz] / n
    outer = np.outer(a, b)[nz] / (n * n)
    mi = float(np.sum(pij * np.log(pij / outer)))
    return max(0.0, mi / max(h_r, h_c))


def ari(r, c) -> float:
    """Adjusted Rand index; 1 for identical degenerate partitions."""
    table = contingency(r, c)
    n = int(table.sum())
    index = _pairs(table)
    sum_r = _pairs(table.sum(axis=1))
    sum_c = _pairs(table.sum(axis=0))
    expected = sum_r * sum_c / (n * (n - 1) / 2) if n > 1 else 0.0
    max_index = 0.5 * (sum_r + sum_c)
    if max_index == expected:
        return 1.0
    return (index - expected) / (max_index - expected)


def fmi(r, c) -> float:
    """Fowlkes-Mallows index over sample pairs; 0 when no pair agrees."""
    table = contingency(r, c)
    tp = _pairs(table)
    if tp == 0:
        return 0.0
    same_c = _pairs(table.sum(axis=0))
    same_r = _pairs(table.sum(axis=1))
    return float(np.sqrt(tp / same_c * tp / same_r))


def all_metrics(r, c) -> dict:
    return {"acc": accuracy(r, c), "nmi": nmi(r, c), "ari": ari(r, c), "fmi": fmi(r, c)}
