import numpy as np
import pytest

from exposcan.errors import UnknownFile
from exposcan.flows import apply_cwe_rules, build_flow_graph, reachable_flows
from exposcan.flows.reach import FlowStep, FlowTrace, SiteRef
from exposcan.harness import generate_benchmark, score_run
from exposcan.harness.scoring import ScoreReport
from exposcan.javasrc import extract_elements, parse_source
from exposcan.learning.metrics import from_counts
from exposcan.lexicon import SensitiveCategory
from exposcan.report import render_csv, render_text_table
from exposcan.surface import SourceFinding, lexicon_sources, rule_list_sinks
from exposcan.javasrc.model import CodeElement, ElementKind


def _detections(cases):
    traces = []
    for case in cases:
        for rel, content in case.files.items():
            unit = parse_source(content, rel)
            elements = extract_elements(unit)
            graph = build_flow_graph([unit], {rel: elements})
            raw = reachable_flows(graph, lexicon_sources(unit, elements),
                                  rule_list_sinks(unit, elements))
            traces.extend(apply_cwe_rules(raw, graph))
    return traces


def test_perfect_run_scores_ones():
    cases = [c for c in generate_benchmark(per_cwe=2, seed=5)
             if c.cwe_id in (532, 538)]
    report = score_run(_detections(cases), cases)
    for row in report.rows:
        assert row.metrics.precision == 1.0
        assert row.metrics.recall == 1.0


def test_empty_detections_score_zero():
    cases = [c for c in generate_benchmark(per_cwe=2, seed=5) if c.cwe_id == 532]
    report = score_run([], cases)
    assert report.totals.recall == 0.0
    assert report.totals.precision == 0.0


def test_detection_order_is_irrelevant():
    cases = [c for c in generate_benchmark(per_cwe=3, seed=6)
             if c.cwe_id in (209, 214)]
    detections = _detections(cases)
    forward = score_run(detections, cases)
    rng = np.random.default_rng(0)
    shuffled = [detections[i] for i in rng.permutation(len(detections))]
    backward = score_run(shuffled, cases)
    assert forward.to_dict() == backward.to_dict()


def test_line_tolerance_two():
    cases = [c for c in generate_benchmark(per_cwe=1, seed=7) if c.cwe_id == 532]
    bad = next(c for c in cases if c.polarity == "BAD")
    cwe, rel, line = bad.expected[0]
    element = CodeElement("x", ElementKind.VARIABLE, "dbPassword", "String",
                          rel, line, line, 1, None)
    source = SourceFinding(element, SensitiveCategory.AUTH_CREDENTIALS, 1.0)

    def detection(at_line):
        return FlowTrace(532, "CWE-532", source,
                         [FlowStep("s", rel, at_line, at_line, "x", "callarg", None)],
                         None, SiteRef(rel, at_line, at_line, "s", "d"))

    within = score_run([detection(line + 2)], cases)
    assert within.rows[0].metrics.tp == 1
    outside = score_run([detection(line + 3)], cases)
    assert outside.rows[0].metrics.tp == 0


def test_unknown_file_rejected():
    cases = [c for c in generate_benchmark(per_cwe=1, seed=7) if c.cwe_id == 532]
    element = CodeElement("x", ElementKind.VARIABLE, "pw", "String",
                          "not/in/corpus.java", 1, 1, 1, None)
    stray = FlowTrace(532, "CWE-532",
                      SourceFinding(element, SensitiveCategory.AUTH_CREDENTIALS, 1.0),
                      [FlowStep("s", "not/in/corpus.java", 1, 1, "x", "callarg", None)],
                      None, SiteRef("not/in/corpus.java", 1, 1, "s", "d"))
    with pytest.raises(UnknownFile):
        score_run([stray], cases)


def test_totals_row_matches_published_rendering():
    # micro counts that reproduce the published totals row
    totals = from_counts(tp=114, fp=1, fn=37, tn=138)
    report = ScoreReport(rows=[], totals=totals, n_good=139, n_bad=161)
    table = render_text_table(report)
    total_line = table.splitlines()[-1]
    assert "99.13" in total_line
    assert "75.50" in total_line
    assert "85.71" in total_line
    csv_text = render_csv(report)
    assert "99.13,75.50,85.71" in csv_text.replace("\r", "")


def test_report_renders_all_fourteen_rows():
    cases = generate_benchmark(per_cwe=1, seed=8)
    report = score_run([], cases)
    table = render_text_table(report)
    lines = table.splitlines()
    assert len(report.rows) == 14
    assert lines[-1].lstrip().startswith("Total")
    for cwe in (201, 204, 208, 209, 214, 215, 532, 535, 536, 537, 538, 550, 598, 615):
        assert any(line.lstrip().startswith(str(cwe)) for line in lines)
