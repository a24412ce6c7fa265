"""Step I: classify elements into sensitive sources and exposure sinks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embeddings import Role, Vector, combine
from .errors import ModelMissing
from .javasrc import extract_context, extract_elements
from .javasrc.model import CodeElement, ElementKind, SourceUnit
from .learning import ClassifierModel, TaskKind
from .lexicon import (
    SensitiveCategory,
    SinkKind,
    match_category,
    rule_list_sink_kind,
)

SOURCE_KINDS = (ElementKind.VARIABLE, ElementKind.STRING_LITERAL, ElementKind.COMMENT)


@dataclass
class SourceFinding:
    element: CodeElement
    category: SensitiveCategory
    score: float

    def to_record(self) -> dict:
        return {
            "file": self.element.file,
            "line": self.element.start_line,
            "kind": self.element.kind.value,
            "name": self.element.name,
            "category": self.category.value,
            "score": round(self.score, 6),
        }


@dataclass
class SinkFinding:
    element: CodeElement
    sink_kind: SinkKind
    score: float

    def to_record(self) -> dict:
        return {
            "file": self.element.file,
            "line": self.element.start_line,
            "kind": self.element.kind.value,
            "name": self.element.name,
            "sinkKind": self.sink_kind.value,
            "score": round(self.score, 6),
        }


@dataclass
class SurfaceModels:
    """Trained models for the surface stage; any member may be absent."""

    variables: ClassifierModel | None = None
    strings: ClassifierModel | None = None
    comments: ClassifierModel | None = None
    sink_gate: ClassifierModel | None = None
    sink_kinds: ClassifierModel | None = None
    categories: ClassifierModel | None = None

    def source_model(self, kind: ElementKind) -> ClassifierModel:
        model = {
            ElementKind.VARIABLE: self.variables,
            ElementKind.STRING_LITERAL: self.strings,
            ElementKind.COMMENT: self.comments,
        }.get(kind)
        if model is None:
            raise ModelMissing(kind.value)
        return model


def element_features(element: CodeElement, unit: SourceUnit, provider) -> Vector:
    """Name+context embedding for most elements; name-only for comments."""
    name_vec = provider.embed(element.name, Role.NAME)
    if element.kind is ElementKind.COMMENT:
        return name_vec
    snippet = extract_context(element, unit)
    ctx_vec = provider.embed(snippet.as_text(), Role.CONTEXT)
    return combine(name_vec, ctx_vec)


def _assign_category(element: CodeElement, features: Vector,
                     category_model: ClassifierModel | None) -> SensitiveCategory:
    if (category_model is not None
            and category_model.input_dim == features.shape[0]):
        probs = category_model.predict(features)
        return list(SensitiveCategory)[int(np.argmax(probs))]
    return match_category(element.name) or SensitiveCategory.APP_SPECIFIC


def detect_sources(unit: SourceUnit, models: SurfaceModels, provider,
                   threshold: float = 0.5,
                   elements: list[CodeElement] | None = None) -> list[SourceFinding]:
    """Score variables, strings, and comments; keep those at or above threshold."""
    elements = extract_elements(unit) if elements is None else elements
    findings: list[SourceFinding] = []
    for element in elements:
        if element.kind not in SOURCE_KINDS:
            continue
        model = models.source_model(element.kind)
        features = element_features(element, unit, provider)
        score = float(model.predict(features))
        if score >= threshold:
            category = _assign_category(element, features, models.categories)
            findings.append(SourceFinding(element, category, score))
    return findings


def detect_sinks(unit: SourceUnit, models: SurfaceModels, provider,
                 threshold: float = 0.5,
                 elements: list[CodeElement] | None = None) -> list[SinkFinding]:
    """Rule-list sinks always fire; trained gate+kind models add the rest."""
    elements = extract_elements(unit) if elements is None else elements
    findings: list[SinkFinding] = []
    for element in elements:
        if element.kind is not ElementKind.API_CALL:
            continue
        ruled = rule_list_sink_kind(element)
        if ruled is not None:
            findings.append(SinkFinding(element, ruled, 1.0))
            continue
        if models.sink_gate is None or models.sink_kinds is None:
            continue
        features = element_features(element, unit, provider)
        gate_score = float(models.sink_gate.predict(features))
        if gate_score >= threshold:
            probs = models.sink_kinds.predict(features)
            kind = list(SinkKind)[int(np.argmax(probs))]
            findings.append(SinkFinding(element, kind, gate_score))
    return findings


def lexicon_sources(unit: SourceUnit,
                    elements: list[CodeElement] | None = None) -> list[SourceFinding]:
    """Rules-only source surface: lexicon truth, no models, score 1.0."""
    elements = extract_elements(unit) if elements is None else elements
    findings = []
    for element in elements:
        if element.kind not in SOURCE_KINDS:
            continue
        category = match_category(element.name)
        if category is not None:
            findings.append(SourceFinding(element, category, 1.0))
    return findings


def rule_list_sinks(unit: SourceUnit,
                    elements: list[CodeElement] | None = None) -> list[SinkFinding]:
    """Rules-only sink surface from the built-in rule list."""
    elements = extract_elements(unit) if elements is None else elements
    findings = []
    for element in elements:
        if element.kind is not ElementKind.API_CALL:
            continue
        kind = rule_list_sink_kind(element)
        if kind is not None:
            findings.append(SinkFinding(element, kind, 1.0))
    return findings


def task_input_dim(kind: str, provider_dim: int) -> int:
    """Feature width per task: comments embed name only, others name+context."""
    if kind == "comments":
        return provider_dim
    return provider_dim * 2


TASK_KINDS: dict[str, TaskKind] = {
    "variables": TaskKind.BINARY,
    "strings": TaskKind.BINARY,
    "comments": TaskKind.BINARY,
    "sinks": TaskKind.BINARY,
    "sink-kinds": TaskKind.SINK8,
    "categories": TaskKind.SINK8,
    "flows": TaskKind.BINARY,
}
