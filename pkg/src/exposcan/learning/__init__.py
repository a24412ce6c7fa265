"""Classifiers, oversampling, training, and metrics shared by both engines."""

from .metrics import Metrics, evaluate, from_counts
from .network import ClassifierModel, TaskKind, build_classifier, layer_widths
from .smote import smote
from .training import (
    LabeledExample,
    SearchSpace,
    TrainConfig,
    TrainResult,
    predict_labels,
    train,
)

__all__ = [
    "ClassifierModel",
    "LabeledExample",
    "Metrics",
    "SearchSpace",
    "TaskKind",
    "TrainConfig",
    "TrainResult",
    "build_classifier",
    "evaluate",
    "from_counts",
    "layer_widths",
    "predict_labels",
    "smote",
    "train",
]
