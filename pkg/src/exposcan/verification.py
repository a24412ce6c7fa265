"""Step III: enrich, deduplicate, embed, and classify flow traces.

Each trace is rebuilt against the original sources (exact line snippets,
static types where declarations resolve them, a semantic role per step),
serialized canonically, and hashed with SHA-256 for deduplication. Flow
embeddings segment the serialization at step boundaries and pool segment
vectors with a learned attention query; a binary residual classifier then
scores each flow as a true or false positive.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import MissingFile, SpanOutOfRange
from .flows.reach import FlowStep, FlowTrace
from .javasrc.model import SourceUnit
from .learning import (
    ClassifierModel,
    LabeledExample,
    SearchSpace,
    TaskKind,
    TrainResult,
    train,
)
from .embeddings import Role, Vector

STEP_SEPARATOR = "␞"   # ␞ between steps
FIELD_SEPARATOR = "⟂"  # ⟂ between role, type, and snippet
DEFAULT_SEGMENT_CHARS = 512

_ROLES = ("Source", "Assignment", "Concatenation", "CallArgument", "Parameter",
          "Return", "FieldAccess", "CollectionOp", "Sink")

_EDGE_ROLE = {
    "Assign": "Assignment",
    "Concat": "Concatenation",
    "ArgToParam": "Parameter",
    "ReturnToCaller": "Return",
    "FieldStore": "FieldAccess",
    "FieldLoad": "FieldAccess",
    "CollectionInsert": "CollectionOp",
    "CollectionRead": "CollectionOp",
}

_KIND_ROLE = {
    "callarg": "CallArgument",
    "field": "FieldAccess",
}


@dataclass
class EnrichedStep:
    snippet: str
    data_type: str
    role: str


@dataclass
class EnrichedFlow:
    cwe_id: int
    steps: list[EnrichedStep]
    serialization: str
    digest: bytes

    @property
    def digest_hex(self) -> str:
        return self.digest.hex()


@dataclass
class Verdict:
    probability: float
    is_true_positive: bool

    @classmethod
    def from_probability(cls, probability: float, threshold: float = 0.5) -> "Verdict":
        return cls(float(probability), bool(probability >= threshold))


def _collapse_ws(text: str) -> str:
    return re.sub(r"\s+", " ", text).strip()


def serialize_steps(cwe_id: int, steps: list[EnrichedStep]) -> str:
    rendered = [
        FIELD_SEPARATOR.join((step.role, step.data_type, _collapse_ws(step.snippet)))
        for step in steps
    ]
    return f"CWE-{cwe_id}|" + STEP_SEPARATOR.join(rendered)


def flow_digest(serialization: str) -> bytes:
    return hashlib.sha256(serialization.encode("utf-8")).digest()


def _step_role(step: FlowStep, first: bool, last: bool) -> str:
    if first:
        return "Source"
    if last:
        return "Sink"
    role = _KIND_ROLE.get(step.node_kind)
    if role is not None and step.in_edge not in ("ReturnToCaller", "CollectionRead"):
        return role
    if step.in_edge is not None:
        return _EDGE_ROLE.get(step.in_edge, "Assignment")
    return "Assignment"


def _snippet(unit: SourceUnit, step: FlowStep) -> str:
    if step.line < 1 or step.end_line > len(unit.lines):
        raise SpanOutOfRange(
            f"{step.file}:{step.line}-{step.end_line} outside of {len(unit.lines)} lines")
    return "\n".join(unit.lines[step.line - 1:step.end_line])


def enrich_flow(trace: FlowTrace, units: dict[str, SourceUnit] | list[SourceUnit]) -> EnrichedFlow:
    """Attach snippet, type, and role per step; serialize and hash the result.

    Zero-intermediate traces (a comment that is both source and sink) are
    rendered with an explicit Source and Sink step over the same site.
    """
    if not isinstance(units, dict):
        units = {unit.path: unit for unit in units}
    if trace.cwe_id is None:
        raise ValueError("enrich_flow needs a rule-tagged trace")
    raw_steps = trace.steps
    if len(raw_steps) == 1:
        raw_steps = [raw_steps[0], raw_steps[0]]
    enriched: list[EnrichedStep] = []
    for i, step in enumerate(raw_steps):
        unit = units.get(step.file)
        if unit is None:
            raise MissingFile(step.file)
        snippet = _snippet(unit, step)
        role = _step_role(step, i == 0, i == len(raw_steps) - 1)
        enriched.append(EnrichedStep(snippet, step.data_type or "unknown", role))
    serialization = serialize_steps(trace.cwe_id, enriched)
    return EnrichedFlow(trace.cwe_id, enriched, serialization,
                        flow_digest(serialization))


def dedup_flows(flows: list[EnrichedFlow]) -> list[EnrichedFlow]:
    """Keep the first flow per digest; stable and idempotent."""
    seen: set[bytes] = set()
    kept = []
    for flow in flows:
        if flow.digest in seen:
            continue
        seen.add(flow.digest)
        kept.append(flow)
    return kept


# ----------------------------------------------------------------------
# Flow embedding: segmentation plus attention pooling.

@dataclass
class AttentionAggregator:
    """Softmax-weighted pooling of segment vectors with a trained query.

    A zero query gives uniform attention, so a single-segment flow maps to
    exactly that segment's vector.
    """

    dim: int
    query: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.query is None:
            self.query = np.zeros(self.dim, dtype=np.float64)

    def combine(self, segment_vectors: np.ndarray) -> Vector:
        scores = segment_vectors @ self.query
        scores = scores - scores.max()
        weights = np.exp(scores)
        weights /= weights.sum()
        return weights @ segment_vectors

    def to_json_dict(self) -> dict:
        return {"dim": self.dim, "query": self.query.tolist()}

    @classmethod
    def from_json_dict(cls, data: dict) -> "AttentionAggregator":
        return cls(int(data["dim"]), np.asarray(data["query"], dtype=np.float64))

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(self.to_json_dict(), handle)

    @classmethod
    def load(cls, path) -> "AttentionAggregator":
        with open(path, encoding="utf-8") as handle:
            return cls.from_json_dict(json.load(handle))


def segment_serialization(serialization: str,
                          max_chars: int = DEFAULT_SEGMENT_CHARS) -> list[str]:
    """Split at step boundaries into chunks of at most max_chars.

    A single step longer than max_chars is hard-wrapped so no segment ever
    exceeds the limit.
    """
    pieces: list[str] = []
    for piece in serialization.split(STEP_SEPARATOR):
        while len(piece) > max_chars:
            pieces.append(piece[:max_chars])
            piece = piece[max_chars:]
        pieces.append(piece)
    segments: list[str] = []
    current = ""
    for piece in pieces:
        candidate = piece if not current else current + STEP_SEPARATOR + piece
        if current and len(candidate) > max_chars:
            segments.append(current)
            current = piece
        else:
            current = candidate
    if current:
        segments.append(current)
    return segments


def segment_vectors(serialization: str, provider,
                    max_chars: int = DEFAULT_SEGMENT_CHARS) -> np.ndarray:
    segments = segment_serialization(serialization, max_chars)
    vecs = [
        provider.embed(f"{segment} [pos={i}]", Role.CONTEXT)
        for i, segment in enumerate(segments)
    ]
    return np.stack(vecs)


def embed_flow(flow: EnrichedFlow, provider, aggregator: AttentionAggregator,
               max_chars: int = DEFAULT_SEGMENT_CHARS) -> Vector:
    return aggregator.combine(segment_vectors(flow.serialization, provider, max_chars))


def verify_flow(flow: EnrichedFlow, model: ClassifierModel, provider,
                aggregator: AttentionAggregator, threshold: float = 0.5,
                max_chars: int = DEFAULT_SEGMENT_CHARS) -> Verdict:
    probability = model.predict(embed_flow(flow, provider, aggregator, max_chars))
    return Verdict.from_probability(probability, threshold)


# ----------------------------------------------------------------------
# Verifier training over labeled serializations.

def train_aggregator(serializations: list[str], labels: list[int], provider,
                     max_chars: int = DEFAULT_SEGMENT_CHARS) -> AttentionAggregator:
    """Fit the attention query as the normalized class-mean difference.

    Attention then favors segments resembling true-positive flows: a cheap,
    deterministic stand-in for a full transformer aggregator.
    """
    pos, neg = [], []
    for serialization, label in zip(serializations, labels):
        vecs = segment_vectors(serialization, provider, max_chars)
        (pos if label == 1 else neg).append(vecs.mean(axis=0))
    if not pos or not neg:
        return AttentionAggregator(provider.dim)
    direction = np.mean(pos, axis=0) - np.mean(neg, axis=0)
    norm = np.linalg.norm(direction)
    if norm > 0:
        direction /= norm
    return AttentionAggregator(provider.dim, direction)


def train_flow_verifier(serializations: list[str], labels: list[int], provider,
                        seed: int = 0, space: SearchSpace | None = None,
                        max_chars: int = DEFAULT_SEGMENT_CHARS
                        ) -> tuple[ClassifierModel, AttentionAggregator, TrainResult]:
    aggregator = train_aggregator(serializations, labels, provider, max_chars)
    examples = [
        LabeledExample(
            aggregator.combine(segment_vectors(serialization, provider, max_chars)),
            int(label), f"flow:{i}")
        for i, (serialization, label) in enumerate(zip(serializations, labels))
    ]
    result = train(provider.dim, TaskKind.BINARY, examples, space=space, seed=seed,
                   provider_id=provider.descriptor.id)
    return result.model, aggregator, result
