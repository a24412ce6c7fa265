import numpy as np
import pytest

from exposcan.errors import MinorityTooSmall, NotBinaryTask
from exposcan.learning import LabeledExample, smote


def _examples(n0, n1, dim=4, seed=0):
    rng = np.random.default_rng(seed)
    out = [LabeledExample(rng.normal(size=dim), 0, f"a{i}") for i in range(n0)]
    out += [LabeledExample(rng.normal(size=dim), 1, f"b{i}") for i in range(n1)]
    return out


def test_balanced_input_is_returned_unchanged():
    data = _examples(10, 10)
    out = smote(data, seed=1)
    assert out == data


def test_two_point_minority_stays_on_segment():
    data = [
        LabeledExample(np.array([0.0, 0.0]), 1, "m0"),
        LabeledExample(np.array([1.0, 1.0]), 1, "m1"),
    ] + [LabeledExample(np.random.default_rng(i).normal(size=2), 0, f"M{i}")
         for i in range(10)]
    out = smote(data, k=1, seed=5)
    synthetic = [e for e in out if e.source_ref.startswith("smote:")]
    assert len(synthetic) == 8
    for example in synthetic:
        x, y = example.features
        assert x == pytest.approx(y, abs=1e-9)  # on the segment (0,0)-(1,1)
        assert -1e-9 <= x <= 1 + 1e-9


def test_published_string_counts_balance():
    data = _examples(2013, 336, dim=3, seed=2)
    out = smote(data, seed=3)
    counts = {0: 0, 1: 0}
    for example in out:
        counts[example.label] += 1
    assert counts == {0: 2013, 1: 2013}


def test_majority_untouched_and_order_preserved():
    data = _examples(12, 5, seed=4)
    out = smote(data, seed=6)
    assert out[:len(data)] == data
    assert all(e.label == 1 for e in out[len(data):])


def test_every_synthetic_point_is_convex_combination():
    data = _examples(30, 8, dim=6, seed=7)
    minority = np.stack([e.features for e in data if e.label == 1])
    out = smote(data, seed=8)
    for example in out[len(data):]:
        x = example.features
        # nearest pair (a, b) with x = a + u (b - a) for u in [0, 1]
        best = np.inf
        for i in range(len(minority)):
            for j in range(len(minority)):
                if i == j:
                    continue
                a, b = minority[i], minority[j]
                segment = b - a
                denom = float(segment @ segment)
                u = float((x - a) @ segment) / denom if denom else 0.0
                if -1e-9 <= u <= 1 + 1e-9:
                    gap = np.linalg.norm(x - (a + u * segment))
                    best = min(best, gap)
        assert best <= 1e-9


def test_deterministic_given_seed():
    data = _examples(20, 6, seed=9)
    first = smote(data, seed=10)
    second = smote(data, seed=10)
    assert all(np.array_equal(a.features, b.features) for a, b in zip(first, second))


def test_not_binary_task():
    data = [LabeledExample(np.zeros(2), label, "x") for label in (0, 1, 2)]
    with pytest.raises(NotBinaryTask):
        smote(data)


def test_minority_too_small():
    data = _examples(10, 1)
    with pytest.raises(MinorityTooSmall):
        smote(data)
