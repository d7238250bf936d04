"""Brute-force oracles and seeded synthetic data for verification.

Nothing here is used by the solver itself; the functions exist so that tests
can check the fast paths against slow, obviously-correct ones.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .data import View, assemble_dataset
from .errors import LengthMismatch, TooLarge

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f, lo, hi, tol=1e-9, max_iter=500):
    """Minimize a unimodal scalar function on ``[lo, hi]``."""
    a, b = float(lo), float(hi)
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


SCALAR_PIECES = {
    "gaussian": lambda b, x: 0.5 * (x - b) ** 2,
    "manhattan": lambda b, x: abs(x - b),
    "bernoulli": lambda b, x: math.log1p(math.exp(b)) - x * b if b < 30 else b - x * b,
    "l0": lambda b, x: float(b != 0.0),
    "l1": lambda b, x: abs(b),
}


def prox_objective_scalar(f, b, a, tau, x=0.0):
    return tau * SCALAR_PIECES[f](b, x) + 0.5 * (b - a) ** 2


def prox_oracle_scalar(f, a, tau, x=0.0):
    """Scalar prox by golden-section search plus candidate points.

    ``f`` names one of :data:`SCALAR_PIECES`; ``x`` is the observation used
    by the loss pieces. The candidates ``a``, ``x`` and ``0`` cover the kinks
    and the hard-threshold jump; on an exact tie the later candidate wins, so
    hard-threshold ties go to zero.
    """
    if tau == 0:
        return float(a)
    half = 10.0 * (1.0 + tau)

    def obj(b):
        return prox_objective_scalar(f, b, a, tau, x)

    best = golden_section(obj, a - half, a + half)
    # exact candidates win float ties against the search point; 0 comes last
    for cand in (a, x, 0.0):
        if obj(cand) <= obj(best):
            best = cand
    return float(best)


def prox_oracle_group(a, weight, tau):
    """Weighted l2,0 prox of one column: the better of ``a`` and ``0``.

    Ties go to zero.
    """
    a = np.asarray(a, dtype=float)
    keep = tau * weight
    drop = 0.5 * float(np.dot(a, a))
    return a.copy() if keep < drop else np.zeros_like(a)


def prox_oracle_shrink(a, thresh):
    """Prox of ``thresh * ||u||_2`` by golden-section on the magnitude.

    The minimizer is parallel to ``a``, so only its length is searched.
    """
    a = np.asarray(a, dtype=float)
    norm = float(np.linalg.norm(a))
    if norm == 0.0:
        return np.zeros_like(a)
    s = golden_section(lambda s: thresh * s + 0.5 * (s - norm) ** 2, 0.0, norm, tol=1e-12)
    if 0.5 * norm ** 2 <= thresh * s + 0.5 * (s - norm) ** 2:
        s = 0.0
    return a * (s / norm)


def _pair_counts(r, c):
    r = list(r)
    c = list(c)
    if len(r) != len(c):
        raise LengthMismatch("label vectors differ in length")
    tp = fp = fn = tn = 0
    for i, j in itertools.combinations(range(len(r)), 2):
        same_r = r[i] == r[j]
        same_c = c[i] == c[j]
        if same_r and same_c:
            tp += 1
        elif same_c:
            fp += 1
        elif same_r:
            fn += 1
        else:
            tn += 1
    return tp, fp, fn, tn


def acc_oracle(r, c, max_n=8):
    r = list(r)
    c = list(c)
    if len(r) != len(c):
        raise LengthMismatch("label vectors differ in length")
    if len(r) > max_n:
        raise TooLarge(f"exhaustive accuracy limited to n <= {max_n}")
    rs = sorted(set(r))
    cs = sorted(set(c))
    # map predicted clusters injectively onto truth labels (plus dummies)
    targets = rs + [None] * max(0, len(cs) - len(rs))
    best = 0
    for perm in itertools.permutations(targets, len(cs)):
        m = dict(zip(cs, perm))
        best = max(best, sum(ri == m[ci] for ri, ci in zip(r, c)))
    return best / len(r)


def ari_oracle(r, c):
    tp, fp, fn, tn = _pair_counts(r, c)
    total = tp + fp + fn + tn
    same_r = tp + fn
    same_c = tp + fp
    expected = same_r * same_c / total
    max_index = 0.5 * (same_r + same_c)
    if max_index == expected:
        return 1.0
    return (tp - expected) / (max_index - expected)


def fmi_oracle(r, c):
    tp, fp, fn, _ = _pair_counts(r, c)
    if tp == 0:
        return 0.0
    return math.sqrt(tp / (tp + fp) * tp / (tp + fn))


def metric_oracles(r, c, max_n=8):
    """``(acc, ari, fmi)`` by permutation and pair enumeration."""
    if len(r) > max_n:
        raise TooLarge(f"exhaustive metrics limited to n <= {max_n}")
    return acc_oracle(r, c, max_n), ari_oracle(r, c), fmi_oracle(r, c)


def nmi_oracle(r, c):
    """NMI straight from the definition, with explicit loops."""
    n = len(r)
    rs, cs = sorted(set(r)), sorted(set(c))
    pr = {a: sum(1 for x in r if x == a) / n for a in rs}
    pc = {b: sum(1 for y in c if y == b) / n for b in cs}
    mi = 0.0
    for a in rs:
        for b in cs:
            pab = sum(1 for x, y in zip(r, c) if x == a and y == b) / n
            if pab > 0:
                mi += pab * math.log(pab / (pr[a] * pc[b]))
    hr = -sum(q * math.log(q) for q in pr.values())
    hc = -sum(q * math.log(q) for q in pc.values())
    if hr == 0 and hc == 0:
        return 1.0
    return mi / max(hr, hc)


def set_partitions(n):
    """All labelings of ``n`` items in restricted-growth form (Bell(n) many)."""
    def rec(prefix, k):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for lab in range(k + 1):
            yield from rec(prefix + [lab], max(k, lab + 1))
    yield from rec([], 0)


@dataclass(frozen=True, eq=False)
class PlantedInstance:
    """Three-cluster, two-view instance with a known feature support.

    View 0 is Gaussian (10 columns, the first 4 informative), view 1 holds
    Poisson counts modelled with the Manhattan loss (8 columns, the first 3
    informative). Informative indices are 0-based.
    """

    seed: int
    labels: np.ndarray
    gaussian: np.ndarray
    counts: np.ndarray
    informative: tuple

    def dataset(self, extra_gaussian=None):
        g = self.gaussian if extra_gaussian is None else np.hstack([self.gaussian, extra_gaussian])
        return assemble_dataset([View(g, "gaussian", name="gaussian"),
                                 View(self.counts, "manhattan", name="counts")])


PLANTED_N = 60
PLANTED_MEANS = (-3.0, 0.0, 3.0)
PLANTED_RATES = (2.0, 8.0, 16.0)
PLANTED_NOISE_RATE = 4.0


def make_planted(seed: int = 7) -> PlantedInstance:
    rng = np.random.default_rng(seed)
    labels = rng.permutation(np.repeat(np.arange(3), PLANTED_N // 3))
    means = np.asarray(PLANTED_MEANS)[labels]
    gauss = rng.standard_normal((PLANTED_N, 10))
    gauss[:, :4] += means[:, None]
    rates = np.asarray(PLANTED_RATES)[labels]
    counts = np.empty((PLANTED_N, 8))
    counts[:, :3] = rng.poisson(np.repeat(rates[:, None], 3, axis=1))
    counts[:, 3:] = rng.poisson(PLANTED_NOISE_RATE, size=(PLANTED_N, 5))
    return PlantedInstance(seed=seed, labels=labels + 1, gaussian=gauss, counts=counts,
                           informative=(np.arange(4), np.arange(3)))


def poisson_noise_columns(seed, n, k, rate=PLANTED_NOISE_RATE):
    """``k`` extra pure-noise Poisson columns for robustness checks."""
    return np.random.default_rng(seed).poisson(rate, size=(n, k)).astype(float)


def make_blobs(n, p, seed=0, n_clusters=3, n_informative=None, separation=3.0):
    """Single-view Gaussian data for benchmarks; returns ``(X, labels)``."""
    rng = np.random.default_rng(seed)
    labels = np.arange(n) % n_clusters
    n_informative = p if n_informative is None else n_informative
    X = rng.standard_normal((n, p))
    X[:, :n_informative] += separation * (labels[:, None] - (n_clusters - 1) / 2.0)
    return X, labels + 1


# ---------------------------------------------------------------- prox suite

def _hard_result(name, got, want, margin, band):
    # exact comparison, skipped inside the threshold band
    if abs(margin) < band:
        return None
    return float(np.max(np.abs(np.asarray(got) - np.asarray(want)), initial=0.0))


def prox_suite(n_cases=1000, seed=0, band=1e-9):
    """Compare every shipped prox with its oracle on seeded random inputs.

    Returns ``{name: (n_checked, n_skipped, max_abs_error)}``. Hard-threshold
    cases within ``band`` of their threshold are skipped; everything else
    counts.
    """
    from .losses import loss_prox
    from .penalties import (
        prox_fusion_rows,
        prox_group_l0_columns,
        prox_group_lasso_columns,
        prox_l0_elements,
        prox_l1_elements,
    )

    rng = np.random.default_rng(seed)
    stats = {}

    def record(name, err):
        checked, skipped, worst = stats.get(name, (0, 0, 0.0))
        if err is None:
            stats[name] = (checked, skipped + 1, worst)
        else:
            stats[name] = (checked + 1, skipped, max(worst, err))

    for _ in range(n_cases):
        tau = float(rng.uniform(0.01, 5.0))
        a = float(rng.normal(0.0, 3.0))
        x = float(rng.normal(0.0, 2.0))
        for kind in ("gaussian", "manhattan"):
            got = loss_prox(kind, [[x]], [[a]], tau)[0, 0]
            record(f"loss:{kind}", abs(got - prox_oracle_scalar(kind, a, tau, x)))
        xb = float(rng.uniform(0.0, 1.0))
        got = loss_prox("bernoulli", [[xb]], [[a]], tau)[0, 0]
        record("loss:bernoulli", abs(got - prox_oracle_scalar("bernoulli", a, tau, xb)))

        t = float(rng.uniform(0.01, 3.0))
        a = float(rng.normal(0.0, 2.0))
        record("l1", abs(prox_l1_elements(a, t) - prox_oracle_scalar("l1", a, t)))
        record("l0", _hard_result("l0", prox_l0_elements(a, t), prox_oracle_scalar("l0", a, t),
                                  abs(a) - math.sqrt(2 * t), band))

        m = int(rng.integers(1, 6))
        col = rng.normal(0.0, 1.5, size=m)
        w = float(rng.uniform(0.2, 2.0))
        got = prox_group_l0_columns(col[:, None], [w], t)[:, 0]
        record("group_l0", _hard_result("group_l0", got, prox_oracle_group(col, w, t),
                                        np.linalg.norm(col) - math.sqrt(2 * t * w), band))
        got = prox_group_lasso_columns(col[:, None], [w], t)[:, 0]
        record("group_lasso", float(np.max(np.abs(got - prox_oracle_shrink(col, t * w)))))
        got = prox_fusion_rows(col[None, :], [w], t)[0]
        record("fusion", float(np.max(np.abs(got - prox_oracle_shrink(col, t * w)))))
    return stats


PROX_TOLERANCES = {
    "loss:gaussian": 1e-6, "loss:manhattan": 1e-6, "loss:bernoulli": 1e-6,
    "l1": 1e-6, "group_lasso": 1e-6, "fusion": 1e-6,
    "l0": 0.0, "group_l0": 0.0,
}
