"""Featurization and training entry points for every learned task."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .embeddings import Role, combine
from .errors import SchemaViolation
from .harness.generate import LabeledElementRecord, generate_element_dataset
from .learning import LabeledExample, SearchSpace, TrainResult, train
from .lexicon import SensitiveCategory, SinkKind
from .pipeline import FLOW_AGGREGATOR_FILE, FLOW_MODEL_FILE, SURFACE_MODEL_FILES
from .surface import TASK_KINDS, task_input_dim
from .verification import train_flow_verifier

_TASK_ELEMENT_KIND = {
    "variables": "Variable",
    "strings": "StringLiteral",
    "comments": "Comment",
    "sinks": "ApiCall",
    "sink-kinds": "ApiCall",
    "categories": "Variable",
}

_BINARY_POSITIVE = {"Sens", "Sink"}

_SINK_KIND_INDEX = {kind.value: i for i, kind in enumerate(SinkKind)}
_CATEGORY_INDEX = {cat.value: i for i, cat in enumerate(SensitiveCategory)}


def record_features(record: LabeledElementRecord, provider) -> np.ndarray:
    name_vec = provider.embed(record.name, Role.NAME)
    if record.kind == "Comment":
        return name_vec
    context_text = "\n".join(p for p in (record.context, record.type) if p)
    return combine(name_vec, provider.embed(context_text, Role.CONTEXT))


def records_to_examples(records: list[LabeledElementRecord], task: str,
                        provider) -> list[LabeledExample]:
    wanted_kind = _TASK_ELEMENT_KIND[task]
    examples: list[LabeledExample] = []
    for record in records:
        if record.kind != wanted_kind:
            continue
        if task in ("variables", "strings", "comments", "sinks"):
            if record.label in _BINARY_POSITIVE:
                label = 1
            elif record.label in ("NonSens", "NonSink"):
                label = 0
            else:
                continue  # eight-way rows in a mixed file
        elif task == "sink-kinds":
            if record.label not in _SINK_KIND_INDEX:
                continue
            label = _SINK_KIND_INDEX[record.label]
        elif task == "categories":
            if record.label not in _CATEGORY_INDEX:
                continue
            label = _CATEGORY_INDEX[record.label]
        else:
            raise SchemaViolation(0, f"unknown task {task!r}")
        examples.append(LabeledExample(record_features(record, provider),
                                       label, record.ref))
    return examples


def train_element_task(records: list[LabeledElementRecord], task: str, provider,
                       seed: int = 0, space: SearchSpace | None = None) -> TrainResult:
    examples = records_to_examples(records, task, provider)
    input_dim = task_input_dim(task, provider.dim)
    return train(input_dim, TASK_KINDS[task], examples, space=space, seed=seed,
                 provider_id=provider.descriptor.id)


def lexicon_truth_records(cases) -> dict[str, list[LabeledElementRecord]]:
    """Parser-extracted elements of generated cases, labeled by lexicon truth.

    Contexts come from the same extraction path the scanner uses, so the
    trained models see the distribution they will be applied to.
    """
    from .javasrc import extract_context, extract_elements, parse_source
    from .javasrc.model import ElementKind
    from .lexicon import match_category, rule_list_sink_kind

    by_task: dict[str, list[LabeledElementRecord]] = {
        task: [] for task in ("variables", "strings", "comments", "sinks",
                              "sink-kinds", "categories")
    }
    for case in cases:
        for rel, content in case.files.items():
            unit = parse_source(content, rel)
            for element in extract_elements(unit):
                ref = element.id
                if element.kind is ElementKind.COMMENT:
                    label = "Sens" if match_category(element.name) else "NonSens"
                    by_task["comments"].append(LabeledElementRecord(
                        ref, "Comment", element.name, "", "", label))
                    continue
                snippet = extract_context(element, unit)
                context = "\n".join(
                    p for p in [snippet.method_text] + snippet.global_lines if p)
                if element.kind is ElementKind.VARIABLE:
                    category = match_category(element.name)
                    label = "Sens" if category else "NonSens"
                    by_task["variables"].append(LabeledElementRecord(
                        ref, "Variable", element.name, context,
                        snippet.type_tag, label))
                    if category is not None:
                        by_task["categories"].append(LabeledElementRecord(
                            ref, "Variable", element.name, context,
                            snippet.type_tag, category.value))
                elif element.kind is ElementKind.STRING_LITERAL:
                    label = "Sens" if match_category(element.name) else "NonSens"
                    by_task["strings"].append(LabeledElementRecord(
                        ref, "StringLiteral", element.name, context, "", label))
                else:
                    kind = rule_list_sink_kind(element)
                    gate = "Sink" if kind else "NonSink"
                    by_task["sinks"].append(LabeledElementRecord(
                        ref, "ApiCall", element.name, context,
                        snippet.type_tag, gate))
                    if kind is not None:
                        by_task["sink-kinds"].append(LabeledElementRecord(
                            ref, "ApiCall", element.name, context,
                            snippet.type_tag, kind.value))
    return by_task


def _subsample(records: list[LabeledElementRecord], cap: int,
               rng: np.random.Generator) -> list[LabeledElementRecord]:
    if len(records) <= cap:
        return records
    by_label: dict[str, list[LabeledElementRecord]] = {}
    for record in records:
        by_label.setdefault(record.label, []).append(record)
    kept: list[LabeledElementRecord] = []
    scale = cap / len(records)
    for label in sorted(by_label):
        group = by_label[label]
        take = max(min(len(group), 12), int(round(len(group) * scale)))
        picks = rng.choice(len(group), size=min(take, len(group)), replace=False)
        kept.extend(group[int(i)] for i in sorted(picks))
    return kept


def default_training_corpus(seed: int = 0, per_cwe: int = 7,
                            cap_per_task: int = 260
                            ) -> dict[str, list[LabeledElementRecord]]:
    """Benchmark-shaped training corpus from a disjoint generator seed.

    Most records come from parsing generated cases, so names recur across
    the same variety of method contexts the scanner will see; a smaller
    pool-coverage slice guarantees every lexicon name was trained on at
    least once. Scarce kinds (sensitive strings and comments) are topped up
    from the synthetic pools, mirroring the augmentation step that makes
    those classes trainable at all.
    """
    from .harness.generate import generate_benchmark

    cases = generate_benchmark(per_cwe=per_cwe, seed=seed + 7919)
    corpus = lexicon_truth_records(cases)
    corpus["variables"].extend(generate_element_dataset("variables", 90, 60, seed))
    corpus["strings"].extend(generate_element_dataset("strings", 30, 30, seed))
    corpus["comments"].extend(generate_element_dataset("comments", 24, 60, seed))
    corpus["sinks"].extend(generate_element_dataset("sinks", 40, 40, seed))
    corpus["sink-kinds"].extend(generate_element_dataset("sink-kinds", 80, 0, seed))
    corpus["categories"].extend(generate_element_dataset("categories", 64, 0, seed))
    rng = np.random.default_rng([seed, 313])
    caps = {"variables": max(cap_per_task, 520)}
    return {task: _subsample(records, caps.get(task, cap_per_task), rng)
            for task, records in corpus.items()}


def train_surface_models(out_dir: str | Path, provider, seed: int = 0,
                         space: SearchSpace | None = None,
                         tasks: tuple[str, ...] = ("variables", "strings", "comments",
                                                   "sinks", "sink-kinds"),
                         corpus: dict[str, list[LabeledElementRecord]] | None = None
                         ) -> dict[str, TrainResult]:
    """Train and persist the surface models the scan pipeline loads."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus = corpus or default_training_corpus(seed)
    results: dict[str, TrainResult] = {}
    for task in tasks:
        result = train_element_task(corpus[task], task, provider, seed=seed,
                                    space=space)
        result.model.save(out / SURFACE_MODEL_FILES[task])
        results[task] = result
    return results


def benchmark_flow_dataset(per_cwe: int = 6, seed: int = 0
                           ) -> tuple[list[str], list[int]]:
    """Labeled flows the way the scan pipeline produces them.

    A training benchmark is scanned with a deliberately over-approximated
    surface (every variable and string is a source), so the resulting flow
    set has the low base precision the verifier exists to repair. A flow is
    labeled Yes when its source is the planted identifier and its sink sits
    at the planted line; everything else is a No.
    """
    from .flows import apply_cwe_rules, build_flow_graph, reachable_flows
    from .harness.generate import generate_benchmark
    from .harness.scoring import file_matches
    from .javasrc import extract_elements
    from .javasrc.model import ElementKind
    from .lexicon import match_category
    from .pipeline import parse_corpus
    from .surface import SourceFinding, rule_list_sinks
    from .verification import enrich_flow

    cases = generate_benchmark(per_cwe=per_cwe, seed=seed)
    named = [(rel, content) for case in cases
             for rel, content in case.files.items()]
    units, _ = parse_corpus(named)
    elements_by_unit = {unit.path: extract_elements(unit) for unit in units}
    sources, sinks = [], []
    for unit in units:
        for element in elements_by_unit[unit.path]:
            if element.kind in (ElementKind.VARIABLE, ElementKind.STRING_LITERAL):
                category = match_category(element.name) or SensitiveCategory.APP_SPECIFIC
                sources.append(SourceFinding(element, category, 1.0))
        sinks.extend(rule_list_sinks(unit, elements_by_unit[unit.path]))
    graph = build_flow_graph(units, elements_by_unit)
    tagged = apply_cwe_rules(reachable_flows(graph, sources, sinks), graph)

    truth: list[tuple[str, int, set[str]]] = []  # (file, line, planted names)
    for case in cases:
        for cwe, rel, line in case.expected:
            truth.append((rel, line, set(case.planted_sources)))

    units_by_path = {unit.path: unit for unit in units}
    serializations: list[str] = []
    labels: list[int] = []
    seen: set[tuple[str, bytes]] = set()
    for trace in tagged:
        flow = enrich_flow(trace, units_by_path)
        key = (trace.sink_file, flow.digest)
        if key in seen:
            continue
        seen.add(key)
        positive = any(
            file_matches(trace.sink_file, rel) and abs(trace.sink_line - line) <= 2
            and trace.source.element.name in planted
            for rel, line, planted in truth
        )
        serializations.append(flow.serialization)
        labels.append(1 if positive else 0)
    return serializations, labels


def train_flow_model(out_dir: str | Path, provider, seed: int = 0,
                     space: SearchSpace | None = None,
                     serializations: list[str] | None = None,
                     labels: list[int] | None = None,
                     per_cwe: int = 20) -> TrainResult:
    """Train and persist the flow verifier plus its aggregator."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if serializations is None or labels is None:
        serializations, labels = benchmark_flow_dataset(per_cwe, seed + 4243)
    model, aggregator, result = train_flow_verifier(serializations, labels,
                                                    provider, seed=seed, space=space)
    model.save(out / FLOW_MODEL_FILE)
    aggregator.save(out / FLOW_AGGREGATOR_FILE)
    return result
