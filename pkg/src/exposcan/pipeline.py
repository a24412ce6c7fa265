"""End-to-end scan orchestration: parse, surface, flows, rules, verify."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .embeddings import DEFAULT_PROVIDER_ID, get_provider
from .errors import BadConfig, FatalSyntax, ModelMissing, UnreadableInput
from .flows import (
    DEFAULT_MAX_DEPTH,
    DEFAULT_RULESET,
    KNOWN_CWE_IDS,
    FlowTrace,
    apply_cwe_rules,
    build_flow_graph,
    detect_comment_exposure,
    detect_discrepancies,
    reachable_flows,
)
from .javasrc import SourceUnit, extract_elements, parse_source
from .learning import ClassifierModel
from .sarif import build_sarif, sarif_to_json, validate_sarif
from .surface import (
    SinkFinding,
    SourceFinding,
    SurfaceModels,
    detect_sinks,
    detect_sources,
    lexicon_sources,
    rule_list_sinks,
)
from .verification import (
    AttentionAggregator,
    EnrichedFlow,
    Verdict,
    enrich_flow,
    verify_flow,
)

SURFACE_MODEL_FILES = {
    "variables": "variables.model.json",
    "strings": "strings.model.json",
    "comments": "comments.model.json",
    "sinks": "sinks.model.json",
    "sink-kinds": "sink-kinds.model.json",
    "categories": "categories.model.json",
}
FLOW_MODEL_FILE = "flows.model.json"
FLOW_AGGREGATOR_FILE = "flows.aggregator.json"


@dataclass
class ScanConfig:
    input_paths: list[str]
    provider_id: str = DEFAULT_PROVIDER_ID
    model_dir: str | None = None
    cwe_filter: list[int] | None = None
    source_threshold: float = 0.5
    sink_threshold: float = 0.5
    verdict_threshold: float = 0.5
    max_flow_depth: int = DEFAULT_MAX_DEPTH
    output_format: str = "sarif"  # sarif | json | text
    seed: int = 0
    rules_only: bool = False
    bridge_command: str | None = None
    bridge_address: str | None = None

    def validate(self) -> None:
        for name in ("source_threshold", "sink_threshold", "verdict_threshold"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise BadConfig(f"{name} must lie in [0, 1], got {value}")
        if self.max_flow_depth < 1:
            raise BadConfig("max_flow_depth must be >= 1")
        if self.output_format not in ("sarif", "json", "text"):
            raise BadConfig(f"unknown output format {self.output_format!r}")
        if self.cwe_filter is not None:
            unknown = set(self.cwe_filter) - KNOWN_CWE_IDS
            if unknown:
                raise BadConfig(f"unknown CWE ids in filter: {sorted(unknown)}")
        if not self.rules_only and self.model_dir is None:
            raise BadConfig("a model directory is required unless rules_only is set")


@dataclass
class ScanResult:
    units: list[SourceUnit]
    sources: list[SourceFinding]
    sinks: list[SinkFinding]
    traces: list[FlowTrace]            # rule-tagged, before verification
    verified: list[FlowTrace]          # after dedup + verification filter
    flows: list[EnrichedFlow]          # enriched flows for the verified traces
    verdicts: list[Verdict | None]
    sarif: dict
    exit_code: int
    warnings: list[str] = field(default_factory=list)
    provider_id: str = ""

    def sarif_json(self) -> str:
        return sarif_to_json(self.sarif)


def collect_java_files(paths: list[str]) -> list[Path]:
    files: list[Path] = []
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            files.extend(sorted(path.rglob("*.java")))
        elif path.suffix == ".java":
            files.append(path)
    return sorted(set(files))


def load_surface_models(model_dir: str | Path) -> SurfaceModels:
    base = Path(model_dir)

    def load(name: str) -> ClassifierModel | None:
        target = base / SURFACE_MODEL_FILES[name]
        return ClassifierModel.load(target) if target.exists() else None

    return SurfaceModels(
        variables=load("variables"),
        strings=load("strings"),
        comments=load("comments"),
        sink_gate=load("sinks"),
        sink_kinds=load("sink-kinds"),
        categories=load("categories"),
    )


def load_flow_verifier(model_dir: str | Path):
    base = Path(model_dir)
    model_path = base / FLOW_MODEL_FILE
    agg_path = base / FLOW_AGGREGATOR_FILE
    if not model_path.exists():
        return None
    model = ClassifierModel.load(model_path)
    aggregator = (AttentionAggregator.load(agg_path) if agg_path.exists()
                  else AttentionAggregator(model.input_dim))
    return model, aggregator


def parse_corpus(named_sources: list[tuple[str, str]]) -> tuple[list[SourceUnit], list[str]]:
    """Parse (path, text) pairs, collecting per-file failures as warnings."""
    units: list[SourceUnit] = []
    warnings: list[str] = []
    for path, text in named_sources:
        try:
            unit = parse_source(text, path)
        except (FatalSyntax, UnreadableInput) as exc:
            warnings.append(f"{path}: {exc}")
            continue
        units.append(unit)
        warnings.extend(f"{path}:{line}: {msg}" for line, msg in unit.warnings)
    return units, warnings


def scan_units(units: list[SourceUnit], config: ScanConfig,
               provider=None, surface_models: SurfaceModels | None = None,
               flow_verifier=None, warnings: list[str] | None = None,
               apply_verification: bool = True) -> ScanResult:
    """Run surface detection, flow tracing, rules, and verification."""
    config.validate()
    warnings = list(warnings or [])
    elements_by_unit = {unit.path: extract_elements(unit) for unit in units}

    provider_id = ""
    if config.rules_only:
        sources, sinks = [], []
        for unit in units:
            elements = elements_by_unit[unit.path]
            sources.extend(lexicon_sources(unit, elements))
            sinks.extend(rule_list_sinks(unit, elements))
    else:
        if provider is None:
            provider = get_provider(config.provider_id,
                                    bridge_command=config.bridge_command,
                                    bridge_address=config.bridge_address)
        provider_id = provider.descriptor.id
        if surface_models is None:
            surface_models = load_surface_models(config.model_dir)
        for task in ("variables", "strings", "comments", "sinks", "sink-kinds"):
            attr = {"variables": "variables", "strings": "strings",
                    "comments": "comments", "sinks": "sink_gate",
                    "sink-kinds": "sink_kinds"}[task]
            if getattr(surface_models, attr) is None:
                raise ModelMissing(task)
        sources, sinks = [], []
        for unit in units:
            elements = elements_by_unit[unit.path]
            sources.extend(detect_sources(unit, surface_models, provider,
                                          config.source_threshold, elements))
            sinks.extend(detect_sinks(unit, surface_models, provider,
                                      config.sink_threshold, elements))

    graph = build_flow_graph(units, elements_by_unit)
    ruleset = DEFAULT_RULESET
    if config.cwe_filter is not None:
        allowed = set(config.cwe_filter)
        ruleset = [rule for rule in DEFAULT_RULESET if rule.cwe_id in allowed]
    raw = reachable_flows(graph, sources, sinks, config.max_flow_depth)
    traces = apply_cwe_rules(raw, graph, ruleset)
    traces.extend(detect_discrepancies(units, sources, elements_by_unit, ruleset))
    comment_traces = detect_comment_exposure(units, sources)
    if config.cwe_filter is None or 615 in set(config.cwe_filter):
        traces.extend(comment_traces)

    units_by_path = {unit.path: unit for unit in units}
    enriched = [enrich_flow(trace, units_by_path) for trace in traces]
    # Digest dedup removes repeated instances of a flow; content-identical
    # flows in different files stay distinct findings, so scope it per file.
    seen: set[tuple[str, bytes]] = set()
    kept_pairs: list[tuple[FlowTrace, EnrichedFlow]] = []
    for trace, flow in zip(traces, enriched):
        key = (trace.sink_file, flow.digest)
        if key in seen:
            continue
        seen.add(key)
        kept_pairs.append((trace, flow))

    verified: list[FlowTrace] = []
    flows: list[EnrichedFlow] = []
    verdicts: list[Verdict | None] = []
    if apply_verification and not config.rules_only:
        if flow_verifier is None and config.model_dir is not None:
            flow_verifier = load_flow_verifier(config.model_dir)
    else:
        flow_verifier = None
    for trace, flow in kept_pairs:
        # Structural and comment findings carry no dataflow; the verifier
        # only judges source-to-sink flows, so they pass through directly.
        if flow_verifier is not None and trace.sink is not None:
            model, aggregator = flow_verifier
            verdict = verify_flow(flow, model, provider, aggregator,
                                  config.verdict_threshold)
            if not verdict.is_true_positive:
                continue
            verdicts.append(verdict)
        else:
            verdicts.append(None)
        verified.append(trace)
        flows.append(flow)

    exit_code = 1 if verified else 0
    sarif = build_sarif(verified, verdicts, provider_id=provider_id,
                        seed=config.seed, exit_code=exit_code, warnings=warnings)
    validate_sarif(sarif)
    return ScanResult(units, sources, sinks, traces, verified, flows, verdicts,
                      sarif, exit_code, warnings, provider_id)


def run_scan(config: ScanConfig) -> ScanResult:
    """Scan .java files or directory trees named by the config."""
    config.validate()
    files = collect_java_files(config.input_paths)
    named = []
    warnings = []
    for path in files:
        try:
            named.append((str(path), path.read_bytes().decode("utf-8")))
        except UnicodeDecodeError as exc:
            warnings.append(f"{path}: not valid UTF-8 ({exc})")
    units, parse_warnings = parse_corpus(named)
    return scan_units(units, config, warnings=warnings + parse_warnings)


def dump_ir(units: list[SourceUnit]) -> str:
    records = []
    for unit in units:
        records.extend(element.to_record() for element in extract_elements(unit))
    return json.dumps(records, indent=2, sort_keys=True) + "\n"
