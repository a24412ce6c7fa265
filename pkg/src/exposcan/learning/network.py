"""Residual feed-forward classifier, built and differentiated by hand.

Architecture: four hidden layers, the first one third of the input width,
each later layer half the previous, with a linear skip projection around
every hidden layer (identity when widths agree). A binary head ends in a
single sigmoid unit; the 8-way sink head ends in a softmax.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionMismatch, InputTooSmall

MODEL_FORMAT_VERSION = 1
HIDDEN_LAYERS = 4


class TaskKind(enum.Enum):
    BINARY = "Binary"
    SINK8 = "Sink8"

    @property
    def n_out(self) -> int:
        return 1 if self is TaskKind.BINARY else 8


def layer_widths(input_dim: int) -> list[int]:
    """First width is input//3, each following width halves."""
    widths = [input_dim // 3]
    for _ in range(HIDDEN_LAYERS - 1):
        widths.append(widths[-1] // 2)
    if any(w < 1 for w in widths):
        raise InputTooSmall(f"input dim {input_dim} collapses a layer to width 0")
    return widths


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    positive = z >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-z[positive]))
    ez = np.exp(z[~positive])
    out[~positive] = ez / (1.0 + ez)
    return out


def _act(name: str, z: np.ndarray) -> np.ndarray:
    if name == "relu":
        return np.maximum(z, 0.0)
    if name == "elu":
        return np.where(z > 0, z, np.expm1(np.minimum(z, 0.0)))
    if name == "sigmoid":
        return _sigmoid(z)
    raise ValueError(f"unknown activation {name!r}")


def _act_grad(name: str, z: np.ndarray, a: np.ndarray) -> np.ndarray:
    if name == "relu":
        return (z > 0).astype(z.dtype)
    if name == "elu":
        return np.where(z > 0, 1.0, a + 1.0)
    if name == "sigmoid":
        return a * (1.0 - a)
    raise ValueError(f"unknown activation {name!r}")


def _softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


@dataclass
class ClassifierModel:
    task_kind: TaskKind
    input_dim: int
    widths: list[int]
    activation: str
    weights: list[np.ndarray]        # hidden layer weight matrices
    biases: list[np.ndarray]
    projections: list[np.ndarray | None]  # skip projections, None = identity
    head_w: np.ndarray
    head_b: np.ndarray
    provider_id: str = ""
    train_config: dict = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)

    # ------------------------------------------------------------------
    # forward / predict

    def forward(self, x: np.ndarray, dropout: float = 0.0,
                rng: np.random.Generator | None = None):
        """Return (output, cache). Output is probabilities."""
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.shape[1] != self.input_dim:
            raise DimensionMismatch(
                f"features have dim {x.shape[1]}, model expects {self.input_dim}")
        cache = {"inputs": [], "zs": [], "acts": [], "masks": []}
        h = x
        for w, b, proj in zip(self.weights, self.biases, self.projections):
            cache["inputs"].append(h)
            z = h @ w + b
            a = _act(self.activation, z)
            skip = h if proj is None else h @ proj
            out = a + skip
            if dropout > 0.0 and rng is not None:
                mask = (rng.random(out.shape) >= dropout) / (1.0 - dropout)
                out = out * mask
                cache["masks"].append(mask)
            else:
                cache["masks"].append(None)
            cache["zs"].append(z)
            cache["acts"].append(a)
            h = out
        logits = h @ self.head_w + self.head_b
        cache["head_input"] = h
        cache["logits"] = logits
        if self.task_kind is TaskKind.BINARY:
            probs = _sigmoid(logits)
        else:
            probs = _softmax(logits)
        return probs, cache

    def predict(self, features: np.ndarray):
        """Binary: scalar probability. Sink8: 8 probabilities summing to 1."""
        probs, _ = self.forward(features)
        if self.task_kind is TaskKind.BINARY:
            return float(probs[0, 0]) if probs.shape[0] == 1 else probs[:, 0]
        return probs[0] if probs.shape[0] == 1 else probs

    # ------------------------------------------------------------------
    # loss and gradients

    def loss_and_grads(self, x: np.ndarray, y: np.ndarray, l2: float = 0.0,
                       dropout: float = 0.0, rng: np.random.Generator | None = None):
        """Mean cross-entropy plus L2 on weight matrices; grads per parameter."""
        probs, cache = self.forward(x, dropout=dropout, rng=rng)
        n = probs.shape[0]
        eps = 1e-12
        if self.task_kind is TaskKind.BINARY:
            target = np.asarray(y, dtype=np.float64).reshape(-1, 1)
            data_loss = -np.mean(
                target * np.log(probs + eps) + (1 - target) * np.log(1 - probs + eps))
            dlogits = (probs - target) / n
        else:
            target = np.asarray(y, dtype=np.int64)
            data_loss = -np.mean(np.log(probs[np.arange(n), target] + eps))
            dlogits = probs.copy()
            dlogits[np.arange(n), target] -= 1.0
            dlogits /= n

        grads = {"weights": [], "biases": [], "projections": []}
        head_in = cache["head_input"]
        grads["head_w"] = head_in.T @ dlogits + 2.0 * l2 * self.head_w
        grads["head_b"] = dlogits.sum(axis=0)
        dh = dlogits @ self.head_w.T

        for i in reversed(range(len(self.weights))):
            mask = cache["masks"][i]
            if mask is not None:
                dh = dh * mask
            z = cache["zs"][i]
            a = cache["acts"][i]
            x_in = cache["inputs"][i]
            dz = dh * _act_grad(self.activation, z, a)
            grads["weights"].append(x_in.T @ dz + 2.0 * l2 * self.weights[i])
            grads["biases"].append(dz.sum(axis=0))
            if self.projections[i] is None:
                dproj = None
                dx = dz @ self.weights[i].T + dh
            else:
                dproj = x_in.T @ dh + 2.0 * l2 * self.projections[i]
                dx = dz @ self.weights[i].T + dh @ self.projections[i].T
            grads["projections"].append(dproj)
            dh = dx

        grads["weights"].reverse()
        grads["biases"].reverse()
        grads["projections"].reverse()

        reg = sum(float(np.sum(w * w)) for w in self.weights)
        reg += sum(float(np.sum(p * p)) for p in self.projections if p is not None)
        reg += float(np.sum(self.head_w * self.head_w))
        return data_loss + l2 * reg, grads

    def loss(self, x: np.ndarray, y: np.ndarray, l2: float = 0.0) -> float:
        value, _ = self.loss_and_grads(x, y, l2=l2)
        return float(value)

    # ------------------------------------------------------------------
    # parameter plumbing (adam updates, snapshots, finite differences)

    def parameters(self) -> list[np.ndarray]:
        params = []
        for w, b, p in zip(self.weights, self.biases, self.projections):
            params.extend([w, b] + ([p] if p is not None else []))
        params.extend([self.head_w, self.head_b])
        return params

    def gradient_list(self, grads: dict) -> list[np.ndarray]:
        out = []
        for gw, gb, gp in zip(grads["weights"], grads["biases"], grads["projections"]):
            out.extend([gw, gb] + ([gp] if gp is not None else []))
        out.extend([grads["head_w"], grads["head_b"]])
        return out

    def snapshot(self) -> list[np.ndarray]:
        return [p.copy() for p in self.parameters()]

    def restore(self, snap: list[np.ndarray]) -> None:
        for param, saved in zip(self.parameters(), snap):
            param[...] = saved

    # ------------------------------------------------------------------
    # persistence

    def to_json_dict(self) -> dict:
        return {
            "formatVersion": MODEL_FORMAT_VERSION,
            "taskKind": self.task_kind.value,
            "inputDim": self.input_dim,
            "layerWidths": self.widths,
            "activation": self.activation,
            "layers": [
                {
                    "weights": w.reshape(-1).tolist(),
                    "bias": b.tolist(),
                    "projection": None if p is None else p.reshape(-1).tolist(),
                }
                for w, b, p in zip(self.weights, self.biases, self.projections)
            ],
            "head": {
                "weights": self.head_w.reshape(-1).tolist(),
                "bias": self.head_b.tolist(),
            },
            "providerId": self.provider_id,
            "trainConfig": self.train_config,
            "metrics": self.metrics,
        }

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(self.to_json_dict(), handle)

    @classmethod
    def from_json_dict(cls, data: dict) -> "ClassifierModel":
        task = TaskKind(data["taskKind"])
        input_dim = int(data["inputDim"])
        widths = [int(w) for w in data["layerWidths"]]
        weights, biases, projections = [], [], []
        d_in = input_dim
        for layer, d_out in zip(data["layers"], widths):
            weights.append(np.asarray(layer["weights"], dtype=np.float64).reshape(d_in, d_out))
            biases.append(np.asarray(layer["bias"], dtype=np.float64))
            proj = layer.get("projection")
            projections.append(
                None if proj is None
                else np.asarray(proj, dtype=np.float64).reshape(d_in, d_out))
            d_in = d_out
        head_w = np.asarray(data["head"]["weights"], dtype=np.float64).reshape(
            widths[-1], task.n_out)
        head_b = np.asarray(data["head"]["bias"], dtype=np.float64)
        return cls(task, input_dim, widths, data["activation"], weights, biases,
                   projections, head_w, head_b, data.get("providerId", ""),
                   data.get("trainConfig", {}), data.get("metrics", {}))

    @classmethod
    def load(cls, path) -> "ClassifierModel":
        with open(path, encoding="utf-8") as handle:
            return cls.from_json_dict(json.load(handle))


def build_classifier(input_dim: int, task_kind: TaskKind, activation: str = "relu",
                     seed: int = 0) -> ClassifierModel:
    """Fresh model with seeded uniform fan-in initialization."""
    widths = layer_widths(input_dim)
    rng = np.random.default_rng(seed)
    weights, biases, projections = [], [], []
    d_in = input_dim
    for d_out in widths:
        bound = 1.0 / np.sqrt(d_in)
        weights.append(rng.uniform(-bound, bound, size=(d_in, d_out)))
        biases.append(np.zeros(d_out))
        projections.append(None if d_in == d_out
                           else rng.uniform(-bound, bound, size=(d_in, d_out)))
        d_in = d_out
    bound = 1.0 / np.sqrt(d_in)
    head_w = rng.uniform(-bound, bound, size=(d_in, task_kind.n_out))
    head_b = np.zeros(task_kind.n_out)
    return ClassifierModel(task_kind, input_dim, widths, activation,
                           weights, biases, projections, head_w, head_b)
