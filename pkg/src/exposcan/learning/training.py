"""Training loop: stratified splits, randomized grid search, Adam, early stop.

The search samples configurations without replacement from the full grid
(96 points), runs stratified cross-validation per configuration with
minority oversampling applied inside each fold for binary tasks, picks the
configuration with the best mean validation F1, retrains it on
train+validation, and reports metrics on the untouched test split. Every
random draw derives from the caller's seed, so results are bit-stable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from ..errors import ClassTooSmall, NonFiniteLoss
from .metrics import Metrics, evaluate
from .network import ClassifierModel, TaskKind, build_classifier


@dataclass
class LabeledExample:
    features: np.ndarray
    label: int
    source_ref: str = ""


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float
    dropout: float
    activation: str
    batch_size: int
    epochs: int
    l2: float = 1e-4
    seed: int = 0
    patience: int = 10
    lr_reduction_factor: float = 0.5
    lr_plateau_window: int = 5
    folds: int = 5
    trials: int = 50

    def to_dict(self) -> dict:
        return {
            "learningRate": self.learning_rate,
            "dropout": self.dropout,
            "activation": self.activation,
            "batchSize": self.batch_size,
            "epochs": self.epochs,
            "l2Coefficient": self.l2,
            "seed": self.seed,
            "patience": self.patience,
            "lrReductionFactor": self.lr_reduction_factor,
            "lrPlateauWindow": self.lr_plateau_window,
            "folds": self.folds,
            "trials": self.trials,
        }


@dataclass
class SearchSpace:
    learning_rates: tuple = (1e-5, 1e-4, 1e-3, 1e-2)
    dropouts: tuple = (0.2, 0.3)
    activations: tuple = ("relu", "elu", "sigmoid")
    batch_sizes: tuple = (32, 64)
    epoch_choices: tuple = (50, 60)
    l2: float = 1e-4
    trials: int = 50
    folds: int = 5

    def grid(self) -> list[tuple]:
        return list(itertools.product(self.learning_rates, self.dropouts,
                                      self.activations, self.batch_sizes,
                                      self.epoch_choices))


@dataclass
class TrainResult:
    model: ClassifierModel
    metrics: Metrics
    config: TrainConfig
    trials: list[dict] = field(default_factory=list)

    def report(self) -> dict:
        return {
            "chosenConfig": self.config.to_dict(),
            "testMetrics": self.metrics.to_dict(),
            "trials": self.trials,
            "trialCount": len(self.trials),
        }


def _stratified_indices(y: np.ndarray, fractions: tuple[float, float, float],
                        rng: np.random.Generator):
    train, val, test = [], [], []
    for label in np.unique(y):
        idx = np.flatnonzero(y == label)
        idx = idx[rng.permutation(len(idx))]
        n = len(idx)
        n_train = int(round(fractions[0] * n))
        n_val = int(round(fractions[1] * n))
        n_train = max(1, min(n_train, n - 2))
        n_val = max(1, min(n_val, n - n_train - 1))
        train.extend(idx[:n_train])
        val.extend(idx[n_train:n_train + n_val])
        test.extend(idx[n_train + n_val:])
    return (np.sort(np.asarray(train)), np.sort(np.asarray(val)),
            np.sort(np.asarray(test)))


def _stratified_kfold(y: np.ndarray, k: int, rng: np.random.Generator):
    folds: list[list[int]] = [[] for _ in range(k)]
    for label in np.unique(y):
        idx = np.flatnonzero(y == label)
        idx = idx[rng.permutation(len(idx))]
        for i, j in enumerate(idx):
            folds[i % k].append(int(j))
    out = []
    all_idx = set(range(len(y)))
    for fold in folds:
        val = np.asarray(sorted(fold))
        train = np.asarray(sorted(all_idx - set(fold)))
        out.append((train, val))
    return out


def _adam_fit(model: ClassifierModel, x: np.ndarray, y: np.ndarray,
              x_val: np.ndarray, y_val: np.ndarray, cfg: TrainConfig,
              rng: np.random.Generator) -> float:
    params = model.parameters()
    m_state = [np.zeros_like(p) for p in params]
    v_state = [np.zeros_like(p) for p in params]
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    lr = cfg.learning_rate
    best = np.inf
    best_snap = model.snapshot()
    stale = plateau = step = 0
    for _ in range(cfg.epochs):
        perm = rng.permutation(len(x))
        for start in range(0, len(x), cfg.batch_size):
            batch = perm[start:start + cfg.batch_size]
            loss, grads = model.loss_and_grads(
                x[batch], y[batch], l2=cfg.l2, dropout=cfg.dropout, rng=rng)
            if not np.isfinite(loss):
                raise NonFiniteLoss(f"loss became {loss}")
            step += 1
            for p, g, m, v in zip(params, model.gradient_list(grads), m_state, v_state):
                m *= beta1
                m += (1 - beta1) * g
                v *= beta2
                v += (1 - beta2) * (g * g)
                m_hat = m / (1 - beta1 ** step)
                v_hat = v / (1 - beta2 ** step)
                p -= lr * m_hat / (np.sqrt(v_hat) + eps)
        val_loss = model.loss(x_val, y_val, l2=cfg.l2)
        if not np.isfinite(val_loss):
            raise NonFiniteLoss(f"validation loss became {val_loss}")
        if val_loss < best - 1e-12:
            best = val_loss
            best_snap = model.snapshot()
            stale = plateau = 0
        else:
            stale += 1
            plateau += 1
        if plateau >= cfg.lr_plateau_window:
            lr *= cfg.lr_reduction_factor
            plateau = 0
        if stale >= cfg.patience:
            break
    model.restore(best_snap)
    return float(best)


def predict_labels(model: ClassifierModel, x: np.ndarray,
                   threshold: float = 0.5) -> np.ndarray:
    probs, _ = model.forward(x)
    if model.task_kind is TaskKind.BINARY:
        return (probs[:, 0] >= threshold).astype(int)
    return probs.argmax(axis=1)


def _maybe_smote(x: np.ndarray, y: np.ndarray, binary: bool, seed: int):
    if not binary or len(np.unique(y)) < 2:
        return x, y
    from .smote import smote  # local import; smote shares LabeledExample

    examples = [LabeledExample(f, int(l)) for f, l in zip(x, y)]
    counts = np.bincount(y, minlength=2)
    if counts.min() < 2:
        return x, y
    balanced = smote(examples, seed=seed)
    return (np.stack([e.features for e in balanced]),
            np.asarray([e.label for e in balanced], dtype=np.int64))


def train(input_dim: int, task_kind: TaskKind, data: list[LabeledExample],
          space: SearchSpace | None = None, seed: int = 0,
          provider_id: str = "") -> TrainResult:
    """Full search + refit + held-out evaluation. Deterministic per seed."""
    space = space or SearchSpace()
    x = np.stack([np.asarray(ex.features, dtype=np.float64) for ex in data])
    y = np.asarray([ex.label for ex in data], dtype=np.int64)
    labels, counts = np.unique(y, return_counts=True)
    if len(labels) < 2:
        raise ClassTooSmall("need at least two classes")
    if counts.min() < 10:
        lowest = labels[counts.argmin()]
        raise ClassTooSmall(f"class {lowest} has only {counts.min()} examples")

    binary = task_kind is TaskKind.BINARY
    split_rng = np.random.default_rng([seed, 7])
    idx_train, idx_val, idx_test = _stratified_indices(y, (0.70, 0.15, 0.15), split_rng)

    grid = space.grid()
    order_rng = np.random.default_rng([seed, 11])
    picks = order_rng.permutation(len(grid))[:min(space.trials, len(grid))]

    trial_rows: list[dict] = []
    best_score, best_cfg = -1.0, None
    x_tr, y_tr = x[idx_train], y[idx_train]
    for trial, grid_idx in enumerate(picks):
        lr, dropout, activation, batch, epochs = grid[int(grid_idx)]
        cfg = TrainConfig(lr, dropout, activation, batch, epochs, l2=space.l2,
                          seed=seed, folds=space.folds, trials=len(picks))
        trial_rng = np.random.default_rng([seed, 101, trial])
        folds = _stratified_kfold(y_tr, space.folds, trial_rng)
        fold_f1s = []
        try:
            for f_train, f_val in folds:
                xf, yf = x_tr[f_train], y_tr[f_train]
                xf, yf = _maybe_smote(xf, yf, binary,
                                      int(trial_rng.integers(2 ** 31)))
                model = build_classifier(input_dim, task_kind, activation,
                                         seed=int(trial_rng.integers(2 ** 31)))
                _adam_fit(model, xf, yf, x_tr[f_val], y_tr[f_val], cfg, trial_rng)
                preds = predict_labels(model, x_tr[f_val])
                fold_f1s.append(evaluate(list(preds), list(y_tr[f_val])).f1)
        except NonFiniteLoss as exc:
            trial_rows.append({"trial": trial, "config": cfg.to_dict(),
                               "cvF1": None, "error": str(exc)})
            continue
        score = float(np.mean(fold_f1s))
        trial_rows.append({"trial": trial, "config": cfg.to_dict(), "cvF1": score})
        if score > best_score + 1e-12:
            best_score, best_cfg = score, cfg

    if best_cfg is None:
        raise NonFiniteLoss("every search trial diverged")

    # Refit the winner on train+validation; an internal stratified holdout
    # drives early stopping so the test split stays untouched.
    final_rng = np.random.default_rng([seed, 9001])
    idx_fit = np.concatenate([idx_train, idx_val])
    y_fit = y[idx_fit]
    inner_tr, inner_val, _ = _stratified_indices(y_fit, (0.85, 0.15, 0.0),
                                                 final_rng)
    x_inner, y_inner = x[idx_fit][inner_tr], y_fit[inner_tr]
    x_inner, y_inner = _maybe_smote(x_inner, y_inner, binary,
                                    int(final_rng.integers(2 ** 31)))
    model = build_classifier(input_dim, task_kind, best_cfg.activation,
                             seed=int(final_rng.integers(2 ** 31)))
    _adam_fit(model, x_inner, y_inner, x[idx_fit][inner_val], y_fit[inner_val],
              best_cfg, final_rng)

    preds = predict_labels(model, x[idx_test])
    metrics = evaluate(list(preds), list(y[idx_test]))
    model.provider_id = provider_id
    model.train_config = best_cfg.to_dict()
    model.metrics = metrics.to_dict()
    return TrainResult(model, metrics, best_cfg, trial_rows)
