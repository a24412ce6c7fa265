"""Minority oversampling by interpolation between nearest minority neighbors."""

from __future__ import annotations

import numpy as np

from ..errors import MinorityTooSmall, NotBinaryTask
from .training import LabeledExample

DEFAULT_K = 5


def smote(examples: list[LabeledExample], k: int = DEFAULT_K,
          seed: int = 0) -> list[LabeledExample]:
    """Balance a binary dataset by synthesizing minority examples.

    Each synthetic point is x + u * (nn - x) for a uniform u in [0, 1] and a
    neighbor nn drawn from the k nearest minority points. Majority examples
    are returned untouched, in their original order, with synthetics
    appended. Deterministic for a given seed.
    """
    labels = {ex.label for ex in examples}
    if not labels <= {0, 1}:
        raise NotBinaryTask(f"labels {sorted(labels)} are not binary")
    count0 = sum(1 for ex in examples if ex.label == 0)
    count1 = len(examples) - count0
    if count0 == count1:
        return list(examples)
    minority_label = 0 if count0 < count1 else 1
    minority = [ex for ex in examples if ex.label == minority_label]
    need = abs(count0 - count1)
    if len(minority) < 2:
        raise MinorityTooSmall("need at least two minority examples to interpolate")
    if k < 1:
        raise ValueError("k must be >= 1")

    points = np.stack([np.asarray(ex.features, dtype=np.float64) for ex in minority])
    n_min = len(minority)
    k_eff = min(k, n_min - 1)
    # Pairwise distances once; fine at desk scale.
    diffs = points[:, None, :] - points[None, :, :]
    dist = np.sqrt((diffs * diffs).sum(axis=2))
    np.fill_diagonal(dist, np.inf)
    neighbor_idx = np.argsort(dist, axis=1, kind="stable")[:, :k_eff]

    rng = np.random.default_rng(seed)
    synthetics: list[LabeledExample] = []
    for i in range(need):
        base = int(rng.integers(n_min))
        nn = int(neighbor_idx[base, int(rng.integers(k_eff))])
        u = float(rng.random())
        features = points[base] + u * (points[nn] - points[base])
        synthetics.append(LabeledExample(features, minority_label, f"smote:{i}"))
    return list(examples) + synthetics
