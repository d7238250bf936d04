import itertools
import math

import numpy as np
import pytest

from mvfuse.errors import EmptyInput, LengthMismatch, TooLarge
from mvfuse.metrics import accuracy, all_metrics, ari, contingency, fmi, nmi
from mvfuse.testing import acc_oracle, metric_oracles, nmi_oracle, set_partitions


def test_worked_values():
    r, c = (1, 1, 2, 2), (1, 1, 1, 2)
    assert accuracy(r, c) == 0.75
    assert ari(r, c) == 0.0
    assert abs(fmi(r, c) - math.sqrt(1 / 3 * 1 / 2)) < 1e-15
    assert abs(fmi(r, c) - 0.40825) < 1e-5
    assert abs(nmi(r, c) - nmi_oracle(r, c)) < 1e-12


def test_accuracy_examples():
    assert accuracy((1, 1, 2), (2, 2, 1)) == 1.0
    assert accuracy((1, 1, 2, 2), (1, 2, 1, 2)) == 0.5
    assert accuracy((3, 1, 2), (3, 1, 2)) == 1.0


def test_nmi_examples():
    assert nmi((1, 2, 1, 3), (1, 2, 1, 3)) == pytest.approx(1.0, abs=1e-15)
    assert nmi((1, 1, 2, 2), (5, 5, 5, 5)) == 0.0
    assert nmi((1, 1, 1), (2, 2, 2)) == 1.0


def test_ari_examples():
    assert ari((1, 1, 2, 2), (1, 1, 2, 2)) == 1.0
    assert ari((1, 1, 2, 2), (2, 2, 1, 1)) == 1.0
    assert ari((1, 2, 3), (1, 2, 3)) == 1.0
    assert ari((1, 1, 1), (1, 1, 1)) == 1.0


def test_fmi_examples():
    assert fmi((1, 1, 2, 2), (1, 1, 2, 2)) == 1.0
    assert fmi((1, 1, 2, 2), (1, 2, 3, 4)) == 0.0


def test_errors():
    with pytest.raises(LengthMismatch):
        ari((1, 2), (1, 2, 3))
    with pytest.raises(EmptyInput):
        accuracy((), ())
    with pytest.raises(TooLarge):
        metric_oracles(list(range(9)), list(range(9)))


def test_contingency_margins(rng):
    r = rng.integers(0, 4, 30)
    c = rng.integers(0, 3, 30)
    T = contingency(r, c)
    assert T.sum() == 30
    assert sorted(T.sum(axis=1)) == sorted(np.bincount(r)[np.bincount(r) > 0])


def test_string_labels():
    assert all_metrics(["a", "a", "b"], ["x", "x", "y"]) == {"acc": 1.0, "nmi": 1.0, "ari": 1.0, "fmi": 1.0}


def test_single_sample_accuracy():
    assert accuracy((4,), (9,)) == acc_oracle((4,), (9,)) == 1.0


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_exhaustive_agreement(n):
    parts = list(set_partitions(n))
    for r, c in itertools.product(parts, parts):
        acc_o, ari_o, fmi_o = metric_oracles(r, c)
        assert accuracy(r, c) == acc_o
        assert ari(r, c) == pytest.approx(ari_o, abs=1e-12)
        assert fmi(r, c) == pytest.approx(fmi_o, abs=1e-12)


def test_bell_numbers():
    assert [len(list(set_partitions(n))) for n in range(1, 7)] == [1, 2, 5, 15, 52, 203]


def test_relabel_invariance_and_symmetry(rng):
    for _ in range(50):
        r = rng.integers(0, 4, 25)
        c = rng.integers(0, 5, 25)
        perm = rng.permutation(10)
        c2 = perm[c]
        for f in (accuracy, nmi, ari, fmi):
            assert f(r, c) == pytest.approx(f(r, c2), abs=1e-12)
            assert f(r, c) == pytest.approx(f(c, r), abs=1e-12)


def test_ari_chance_level(rng):
    r = np.repeat(np.arange(4), 50)
    c = r.copy()
    vals = [ari(r, rng.permutation(c)) for _ in range(100)]
    assert -0.05 <= np.mean(vals) <= 0.05


def test_matches_sklearn(rng):
    skm = pytest.importorskip("sklearn.metrics")
    for _ in range(20):
        r = rng.integers(0, 4, 40)
        c = rng.integers(0, 3, 40)
        assert ari(r, c) == pytest.approx(skm.adjusted_rand_score(r, c), abs=1e-12)
        assert fmi(r, c) == pytest.approx(skm.fowlkes_mallows_score(r, c), abs=1e-12)
        assert nmi(r, c) == pytest.approx(
            skm.normalized_mutual_info_score(r, c, average_method="max"), abs=1e-12)
