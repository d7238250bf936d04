"""Partition and feature-support extraction from a finished solver state."""

from __future__ import annotations

import numpy as np

from .penalties import penalty_family


class UnionFind:
    """Disjoint sets over ``0..n-1`` with path halving and union by size."""

    def __init__(self, n):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, a):
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


def components(n, edges, fused):
    """Label connected components of the fused edges.

    Labels run from 1 and are assigned in order of each component's smallest
    member, so sample 0 always gets label 1.
    """
    uf = UnionFind(n)
    for (i, j), f in zip(np.asarray(edges).reshape(-1, 2).tolist(), np.asarray(fused).tolist()):
        if f:
            uf.union(i, j)
    labels = np.zeros(n, dtype=int)
    root_label = {}
    for i in range(n):
        r = uf.find(i)
        if r not in root_label:
            root_label[r] = len(root_label) + 1
        labels[i] = root_label[r]
    return labels, len(root_label)


def fused_edges(state, graph, params) -> np.ndarray:
    if params.merge_mode == "exact_zero_on_E":
        return ~np.any(state.E != 0, axis=1)
    U = state.U
    n, p = U.shape
    scale = 1.0 + np.linalg.norm(U) / np.sqrt(n * p)
    return np.linalg.norm(graph.apply_D(U), axis=1) <= params.merge_tol * scale


def extract_partition(state, graph, params):
    """Return ``(labels, n_clusters)`` with labels in ``1..n_clusters``."""
    return components(graph.n, graph.edges, fused_edges(state, graph, params))


def extract_feature_support(state, dataset, params):
    """Selected columns and entrywise support of the centered centroids.

    Returns ``(selected, masks)``: per view, a sorted array of selected
    0-based column indices and an ``n x p_v`` boolean mask.

    When the penalty family carries a column (resp. entrywise) sparsity term,
    its slack ``F`` (resp. ``Fbar``) holds exact zeros and decides the
    support. Without any sparsity term there is no selection mechanism and
    every feature is reported as selected.
    """
    fam = penalty_family(params.penalty_family)
    tol = params.support_tol
    centered = state.U - dataset.Xbar
    selected, masks = [], []
    for sl in dataset.slices:
        if fam.inter == "none" and fam.intra == "none":
            mask = np.ones_like(centered[:, sl], dtype=bool)
        else:
            if fam.intra != "none":
                mask = np.abs(state.Fbar[:, sl]) > tol
            else:
                mask = np.abs(centered[:, sl]) > tol
            if fam.inter != "none":
                keep = np.linalg.norm(state.F[:, sl], axis=0) > tol
                mask &= keep[None, :]
        masks.append(mask)
        selected.append(np.flatnonzero(mask.any(axis=0)))
    return selected, masks
