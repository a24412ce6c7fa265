"""Acceptance suite: one test per release criterion, at pinned tolerances.

Each test prints an ``ACCEPTANCE <name>: PASS`` line on success so a plain
pytest run doubles as the criterion checklist.
"""

import time

import numpy as np
import pytest

from exposcan.flows import (
    EdgeKind,
    FlowGraph,
    FlowNode,
    apply_cwe_rules,
    build_flow_graph,
    reachable,
    reachable_flows,
)
from exposcan.flows.graph import GuardInfo
from exposcan.harness import generate_benchmark, score_run
from exposcan.javasrc import extract_elements, parse_source
from exposcan.javasrc.model import CodeElement, ElementKind
from exposcan.learning import (
    LabeledExample,
    SearchSpace,
    TaskKind,
    build_classifier,
    layer_widths,
    smote,
    train,
)
from exposcan.lexicon import SensitiveCategory, SinkKind
from exposcan.pipeline import (
    ScanConfig,
    load_flow_verifier,
    load_surface_models,
    parse_corpus,
    scan_units,
)
from exposcan.sarif import sarif_to_json, validate_sarif
from exposcan.surface import SourceFinding, SinkFinding, lexicon_sources, rule_list_sinks
from exposcan.tasks import benchmark_flow_dataset
from exposcan.verification import (
    EnrichedFlow,
    dedup_flows,
    enrich_flow,
    flow_digest,
    verify_flow,
)

from conftest import EVAL_SEED
from test_learning import gradient_check

pytestmark = pytest.mark.acceptance


def _passed(name: str) -> None:
    print(f"ACCEPTANCE {name}: PASS")


# ----------------------------------------------------------------------
# 1. Dataflow oracle equivalence


def _closure(n, edges):
    reach_matrix = np.eye(n, dtype=bool)
    for src, dst in edges:
        reach_matrix[src, dst] = True
    for k in range(n):
        for i in range(n):
            if reach_matrix[i, k]:
                reach_matrix[i] |= reach_matrix[k]
    return reach_matrix


def _random_graph(rng):
    n = int(rng.integers(2, 31))
    density = float(rng.uniform(0.02, 0.3))
    edges = [(int(i), int(j)) for i in range(n) for j in range(n)
             if i != j and rng.random() < density]
    graph = FlowGraph()
    for i in range(n):
        graph.add_node(FlowNode(f"n{i}", "var", "g.java", i + 1, i + 1, f"n{i}",
                                guards=GuardInfo()))
    for src, dst in edges:
        graph.add_edge(f"n{src}", f"n{dst}", EdgeKind.ASSIGN)
    return n, edges, graph


def _finding_pair(graph, src_idx, dst_idx, tag):
    src_element = CodeElement(f"src{tag}", ElementKind.VARIABLE, "v", "String",
                              "g.java", 1, 1, 1, None)
    graph.nodes[f"n{src_idx}"].element_id = f"src{tag}"
    graph.nodes_by_element.setdefault(f"src{tag}", []).append(f"n{src_idx}")
    sink_element = CodeElement(f"sink{tag}", ElementKind.API_CALL, "emit", None,
                               "g.java", 1, 1, 1, None, qualified_name="emit")
    arg = FlowNode(f"ca{tag}", "callarg", "g.java", 1, 1, "emit arg0",
                   call_element_id=f"sink{tag}", guards=GuardInfo())
    graph.add_node(arg)
    graph.add_edge(f"n{dst_idx}", f"ca{tag}", EdgeKind.ASSIGN)
    return (SourceFinding(src_element, SensitiveCategory.APP_SPECIFIC, 1.0),
            SinkFinding(sink_element, SinkKind.PRINT_OUTPUT, 1.0))


def test_acceptance_dataflow_oracle():
    rng = np.random.default_rng(2024)
    started = time.time()
    mismatches = 0
    for graph_idx in range(200):
        n, edges, graph = _random_graph(rng)
        closure = _closure(n, edges)
        for i in range(n):
            for j in range(n):
                if i != j and reachable(graph, f"n{i}", f"n{j}") != bool(closure[i, j]):
                    mismatches += 1
        # spot-check the same equivalence through reachable_flows itself
        for tag in range(3):
            src = int(rng.integers(n))
            dst = int(rng.integers(n))
            source, sink = _finding_pair(graph, src, dst, f"{graph_idx}_{tag}")
            traces = reachable_flows(graph, [source], [sink])
            expected = bool(closure[src, dst]) or src == dst
            if bool(traces) != expected:
                mismatches += 1
    elapsed = time.time() - started
    assert mismatches == 0
    assert elapsed < 10.0, f"oracle sweep took {elapsed:.1f}s"
    _passed("dataflow-oracle-equivalence")


# ----------------------------------------------------------------------
# 2. Rule-engine soundness with the lexicon-truth surface


def test_acceptance_rule_engine_soundness():
    started = time.time()
    cases = generate_benchmark(per_cwe=10, seed=EVAL_SEED)
    named = [(rel, content) for case in cases
             for rel, content in case.files.items()]
    units, warnings = parse_corpus(named)
    assert warnings == []
    config = ScanConfig(input_paths=["."], rules_only=True, seed=EVAL_SEED)
    result = scan_units(units, config)
    report = score_run(result.verified, cases)
    for row in report.rows:
        assert row.metrics.precision == 1.0, f"CWE-{row.cwe_id}: {row.metrics}"
        assert row.metrics.recall == 1.0, f"CWE-{row.cwe_id}: {row.metrics}"
    elapsed = time.time() - started
    assert elapsed < 120.0, f"rule-engine sweep took {elapsed:.1f}s"
    _passed("rule-engine-soundness")


# ----------------------------------------------------------------------
# 3. End-to-end learned pipeline + 4. verification lift


@pytest.fixture(scope="module")
def learned_scan(trained_model_dir, provider):
    cases = generate_benchmark(per_cwe=10, seed=EVAL_SEED)
    named = [(rel, content) for case in cases
             for rel, content in case.files.items()]
    units, _ = parse_corpus(named)
    config = ScanConfig(input_paths=["."], model_dir=str(trained_model_dir),
                        seed=EVAL_SEED)
    surface_models = load_surface_models(trained_model_dir)
    flow_verifier = load_flow_verifier(trained_model_dir)
    started = time.time()
    result_off = scan_units(units, config, provider=provider,
                            surface_models=surface_models, flow_verifier=None,
                            apply_verification=False)
    result_on = scan_units(units, config, provider=provider,
                           surface_models=surface_models,
                           flow_verifier=flow_verifier)
    scan_seconds = time.time() - started
    return cases, result_off, result_on, scan_seconds


def test_acceptance_end_to_end_learned_pipeline(learned_scan, trained_model_dir):
    cases, result_off, result_on, scan_seconds = learned_scan
    report_on = score_run(result_on.verified, cases)
    training_seconds = float(
        (trained_model_dir / "training-wall-seconds.txt").read_text().strip())
    total = training_seconds + scan_seconds
    assert report_on.totals.f1 >= 0.85, report_on.totals
    assert total < 300.0, f"end-to-end took {total:.0f}s"
    _passed("end-to-end-learned-pipeline "
            f"(micro F1 {report_on.totals.f1:.3f}, {total:.0f}s)")


def test_acceptance_verification_lift(trained_model_dir, provider, learned_scan):
    model, aggregator = load_flow_verifier(trained_model_dir)
    serializations, labels = benchmark_flow_dataset(per_cwe=5, seed=6666)
    positives = [i for i, label in enumerate(labels) if label == 1]
    negatives = [i for i, label in enumerate(labels) if label == 0]
    rng = np.random.default_rng(9)
    n_pos = min(len(positives), len(negatives) // 3)
    keep = sorted(list(rng.choice(positives, size=n_pos, replace=False)) + negatives)
    flow_set = [(serializations[i], labels[i]) for i in keep]
    total_pos = sum(label for _, label in flow_set)
    base_precision = total_pos / len(flow_set)
    assert abs(base_precision - 0.25) < 0.02, "flow set should be ~25% true positives"

    kept = kept_tp = 0
    for serialization, label in flow_set:
        flow = EnrichedFlow(0, [], serialization, flow_digest(serialization))
        verdict = verify_flow(flow, model, provider, aggregator)
        if verdict.is_true_positive:
            kept += 1
            kept_tp += label
    precision_after = kept_tp / kept if kept else 0.0
    recall_after = kept_tp / total_pos
    assert precision_after >= 0.80, f"precision {precision_after:.3f}"
    assert recall_after >= 0.85, f"recall {recall_after:.3f}"
    assert precision_after >= base_precision

    # filtering can only drop findings: on-recall never exceeds off-recall
    cases, result_off, result_on, _ = learned_scan
    assert len(result_on.verified) <= len(result_off.verified)
    report_off = score_run(result_off.verified, cases)
    report_on = score_run(result_on.verified, cases)
    assert report_on.totals.recall <= report_off.totals.recall + 1e-12
    assert report_on.totals.precision >= report_off.totals.precision - 1e-12
    _passed("verification-lift "
            f"(precision {base_precision:.2f} -> {precision_after:.2f}, "
            f"recall {recall_after:.2f})")


# ----------------------------------------------------------------------
# 5. Classifier training


def test_acceptance_classifier_training():
    rng = np.random.default_rng(7)
    worst = 0.0
    for probe in range(32):
        input_dim = int(rng.integers(24, 40))
        task = TaskKind.BINARY if probe % 2 == 0 else TaskKind.SINK8
        activation = ("relu", "elu", "sigmoid")[probe % 3]
        model = build_classifier(input_dim, task, activation, seed=probe)
        x = rng.normal(size=(2, input_dim))
        y = rng.integers(0, 2 if task is TaskKind.BINARY else 8, size=2)
        worst = max(worst, gradient_check(model, x, y))
    assert worst <= 1e-4

    cluster_rng = np.random.default_rng(3)
    data = []
    for label, center in ((0, -2.0), (1, 2.0)):
        for point in cluster_rng.normal(loc=center, size=(200, 24)):
            data.append(LabeledExample(point, label, "c"))
    separable = train(24, TaskKind.BINARY, data, seed=3)
    assert separable.config.trials == 50
    assert separable.metrics.f1 >= 0.95, separable.metrics

    shuffle_rng = np.random.default_rng(7)
    labels = shuffle_rng.permutation([ex.label for ex in data])
    shuffled = [LabeledExample(ex.features, int(label), ex.source_ref)
                for ex, label in zip(data, labels)]
    null_result = train(24, TaskKind.BINARY, shuffled,
                        space=SearchSpace(trials=10, folds=3), seed=17)
    assert 0.35 <= null_result.metrics.f1 <= 0.65, null_result.metrics

    for input_dim in (24, 30, 97, 384, 768, 2048):
        widths = layer_widths(input_dim)
        assert widths[0] == input_dim // 3
        assert all(b == a // 2 for a, b in zip(widths, widths[1:]))
    _passed("classifier-training "
            f"(grad err {worst:.2e}, separable F1 {separable.metrics.f1:.3f}, "
            f"null F1 {null_result.metrics.f1:.3f})")


# ----------------------------------------------------------------------
# 6. SMOTE


def test_acceptance_smote():
    rng = np.random.default_rng(11)
    data = [LabeledExample(rng.normal(size=12), 0, f"maj{i}") for i in range(160)]
    data += [LabeledExample(rng.normal(size=12), 1, f"min{i}") for i in range(40)]
    balanced = smote(data, seed=13)
    counts = {0: 0, 1: 0}
    for example in balanced:
        counts[example.label] += 1
    assert counts[0] == counts[1] == 160
    assert balanced[:len(data)] == data  # majority (and originals) untouched

    minority = np.stack([ex.features for ex in data if ex.label == 1])
    worst = 0.0
    for example in balanced[len(data):]:
        x = example.features
        best = np.inf
        for i in range(len(minority)):
            for j in range(len(minority)):
                if i == j:
                    continue
                a, b = minority[i], minority[j]
                seg = b - a
                denom = float(seg @ seg)
                u = float((x - a) @ seg) / denom if denom else 0.0
                if -1e-9 <= u <= 1 + 1e-9:
                    best = min(best, float(np.linalg.norm(x - (a + u * seg))))
        worst = max(worst, best)
    assert worst <= 1e-9, f"max deviation from a minority segment: {worst}"
    _passed(f"smote (max segment deviation {worst:.2e})")


# ----------------------------------------------------------------------
# 7. Dedup / digest


def test_acceptance_dedup_digest():
    assert flow_digest("abc").hex() == (
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad")
    assert flow_digest("").hex() == (
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855")
    assert flow_digest("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq").hex() == (
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1")

    flows = [EnrichedFlow(200, [], s, flow_digest(s))
             for s in ("CWE-200|a", "CWE-200|a", "CWE-200|b", "CWE-200|a")]
    once = dedup_flows(flows)
    assert [f.serialization for f in once] == ["CWE-200|a", "CWE-200|b"]
    assert dedup_flows(once) == once

    src = """class T {
    void f(String dbPassword) {
        logger.info("entry " + dbPassword);
    }
}
"""
    reformatted = (src
                   .replace("        logger", "   \t     logger")
                   .replace("(String dbPassword)", "(String  dbPassword)")
                   .replace('"entry "', '"entry  "'))

    def digest_of(text):
        unit = parse_source(text, "T.java")
        elements = extract_elements(unit)
        graph = build_flow_graph([unit], {"T.java": elements})
        traces = apply_cwe_rules(
            reachable_flows(graph, lexicon_sources(unit, elements),
                            rule_list_sinks(unit, elements)), graph)
        trace = next(t for t in traces if t.cwe_id == 532)
        return enrich_flow(trace, [unit]).digest

    assert digest_of(src) == digest_of(reformatted)
    _passed("dedup-digest")


# ----------------------------------------------------------------------
# 8. Medical-record fixture


def test_acceptance_fixture_file(medical_record_source, trained_model_dir, provider):
    units, warnings = parse_corpus([("MedicalRecordService.java", medical_record_source)])
    assert warnings == []
    config = ScanConfig(input_paths=["."], model_dir=str(trained_model_dir),
                        seed=EVAL_SEED)
    result = scan_units(units, config, provider=provider,
                        surface_models=load_surface_models(trained_model_dir),
                        flow_verifier=load_flow_verifier(trained_model_dir))
    source_names = {f.element.name for f in result.sources
                    if f.element.kind is ElementKind.VARIABLE}
    assert {"patientId", "DB_URL", "DB_USER", "DB_PASSWORD"} <= source_names
    by_name = {f.element.name: f.category for f in result.sources
               if f.element.kind is ElementKind.VARIABLE}
    assert by_name["patientId"] is SensitiveCategory.PII
    assert by_name["DB_PASSWORD"] is SensitiveCategory.AUTH_CREDENTIALS

    verified_537 = [
        (trace, verdict) for trace, verdict in zip(result.verified, result.verdicts)
        if trace.cwe_id == 537 and trace.sink_line == 23
    ]
    assert verified_537, "the print-in-catch must survive verification"
    trace, verdict = verified_537[0]
    assert trace.sink is not None
    assert trace.sink.sink_kind is SinkKind.PRINT_OUTPUT
    assert verdict is not None and verdict.probability >= 0.5
    _passed(f"fixture-medical-record (p={verdict.probability:.3f})")


# ----------------------------------------------------------------------
# 9. SARIF validity and determinism


def test_acceptance_sarif(trained_model_dir, provider, medical_record_source):
    corpora = []
    cases = [c for c in generate_benchmark(per_cwe=1, seed=EVAL_SEED)
             if c.cwe_id in (532, 615, 204, 598)]
    corpora.append([(rel, content) for case in cases
                    for rel, content in case.files.items()])
    corpora.append([("MedicalRecordService.java", medical_record_source)])
    corpora.append([])

    for named in corpora:
        units, warnings = parse_corpus(named)
        rules_config = ScanConfig(input_paths=["."], rules_only=True, seed=5)
        first = scan_units(units, rules_config, warnings=warnings)
        second = scan_units(units, rules_config, warnings=warnings)
        validate_sarif(first.sarif)
        assert sarif_to_json(first.sarif) == sarif_to_json(second.sarif)

        learned_config = ScanConfig(input_paths=["."], seed=5,
                                    model_dir=str(trained_model_dir))
        surface_models = load_surface_models(trained_model_dir)
        verifier = load_flow_verifier(trained_model_dir)
        third = scan_units(units, learned_config, provider=provider,
                           surface_models=surface_models, flow_verifier=verifier,
                           warnings=warnings)
        fourth = scan_units(units, learned_config, provider=provider,
                            surface_models=surface_models, flow_verifier=verifier,
                            warnings=warnings)
        validate_sarif(third.sarif)
        assert sarif_to_json(third.sarif) == sarif_to_json(fourth.sarif)
    _passed("sarif-validity-and-determinism")
