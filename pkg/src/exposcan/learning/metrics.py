"""Classification metrics with empty-denominator conventions."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import LengthMismatch


@dataclass(frozen=True)
class Metrics:
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    f1: float
    accuracy: float

    def to_dict(self) -> dict:
        return {
            "tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn,
            "precision": self.precision, "recall": self.recall,
            "f1": self.f1, "accuracy": self.accuracy,
        }


def from_counts(tp: int, fp: int, fn: int, tn: int) -> Metrics:
    """Precision/recall/F1/accuracy; zero when a denominator is zero."""
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    total = tp + fp + fn + tn
    accuracy = (tp + tn) / total if total else 0.0
    return Metrics(tp, fp, fn, tn, precision, recall, f1, accuracy)


def evaluate(predictions: list[int], truth: list[int]) -> Metrics:
    """Score predicted labels against ground truth.

    Binary labels use the positive class 1 directly; multi-class labels are
    scored with micro-averaged one-vs-rest counts.
    """
    if len(predictions) != len(truth):
        raise LengthMismatch(f"{len(predictions)} predictions vs {len(truth)} truths")
    labels = set(predictions) | set(truth)
    if labels <= {0, 1}:
        tp = sum(1 for p, t in zip(predictions, truth) if p == 1 and t == 1)
        fp = sum(1 for p, t in zip(predictions, truth) if p == 1 and t == 0)
        fn = sum(1 for p, t in zip(predictions, truth) if p == 0 and t == 1)
        tn = sum(1 for p, t in zip(predictions, truth) if p == 0 and t == 0)
        return from_counts(tp, fp, fn, tn)
    tp = fp = fn = tn = 0
    n = len(truth)
    for label in sorted(labels):
        c_tp = sum(1 for p, t in zip(predictions, truth) if p == label and t == label)
        c_fp = sum(1 for p, t in zip(predictions, truth) if p == label and t != label)
        c_fn = sum(1 for p, t in zip(predictions, truth) if p != label and t == label)
        tp += c_tp
        fp += c_fp
        fn += c_fn
        tn += n - c_tp - c_fp - c_fn
    return from_counts(tp, fp, fn, tn)
