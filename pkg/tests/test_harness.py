import json

import pytest

from exposcan.errors import SchemaViolation
from exposcan.harness import (
    PAPER_SHAPE_COUNTS,
    generate_benchmark,
    generate_element_dataset,
    generate_flow_dataset,
    load_benchmark,
    load_element_dataset,
    load_flow_dataset,
    save_element_dataset,
    save_flow_dataset,
    write_benchmark,
)
from exposcan.javasrc import parse_source


def test_case_counts():
    cases = generate_benchmark(per_cwe=10, seed=0)
    assert len(cases) == 14 * 10 * 2
    bad = [c for c in cases if c.polarity == "BAD"]
    assert len(bad) == 140
    assert all(c.expected for c in bad)
    assert all(not c.expected for c in cases if c.polarity == "GOOD")


def test_generator_determinism():
    first = generate_benchmark(per_cwe=3, seed=9)
    second = generate_benchmark(per_cwe=3, seed=9)
    assert [(c.name, c.files, c.expected) for c in first] == \
           [(c.name, c.files, c.expected) for c in second]


def test_paper_shape_counts():
    cases = generate_benchmark(seed=1, paper_shape=True)
    n_good = sum(1 for c in cases if c.polarity == "GOOD")
    n_bad = len(cases) - n_good
    # row sums of the published table; its headline BAD total is off by ten
    assert (n_good, n_bad) == (139, 151)
    by_cwe = {}
    for case in cases:
        good, bad = by_cwe.get(case.cwe_id, (0, 0))
        if case.polarity == "GOOD":
            by_cwe[case.cwe_id] = (good + 1, bad)
        else:
            by_cwe[case.cwe_id] = (good, bad + 1)
    assert by_cwe == PAPER_SHAPE_COUNTS
    assert by_cwe[538] == (3, 2)


def test_every_case_parses_clean():
    for case in generate_benchmark(per_cwe=2, seed=4):
        for rel, content in case.files.items():
            unit = parse_source(content, rel)
            assert unit.warnings == [], (rel, unit.warnings)


def test_532_bad_logs_reachably_good_is_sanitized():
    cases = [c for c in generate_benchmark(per_cwe=4, seed=2) if c.cwe_id == 532]
    for case in cases:
        content = next(iter(case.files.values()))
        sens = case.planted_sources[0] if case.planted_sources else None
        if case.polarity == "BAD":
            assert "logger.info" in content
            assert sens in content
            line = content.split("\n")[case.expected[0][2] - 1]
            assert "logger.info" in line
        else:
            assert 'logger.info' in content
            assert '+ ' not in content.split("logger.info", 1)[1].split("\n")[0]


def test_write_and_load_round_trip(tmp_path):
    cases = generate_benchmark(per_cwe=1, seed=3)
    out = write_benchmark(cases, tmp_path / "bench")
    assert (out / "manifest.json").exists()
    loaded = load_benchmark(out)
    assert [(c.name, c.expected) for c in loaded] == \
           [(c.name, c.expected) for c in cases]
    manifest = json.loads((out / "manifest.json").read_text())
    assert len(manifest["cases"]) == len(cases)


def test_element_dataset_round_trip(tmp_path):
    records = generate_element_dataset("variables", 12, 18, seed=5)
    path = tmp_path / "vars.csv"
    save_element_dataset(records, path)
    loaded = load_element_dataset(path)
    assert [r.row() for r in loaded] == [r.row() for r in records]


def test_header_only_file_loads_empty(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("ref,kind,name,context,type,label\n")
    assert load_element_dataset(path) == []


def test_bad_label_raises_with_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(
        "ref,kind,name,context,type,label\n"
        "r1,Variable,pw,ctx,String,Sens\n"
        "r2,Variable,pw,ctx,String,Maybe\n")
    with pytest.raises(SchemaViolation) as err:
        load_element_dataset(path)
    assert err.value.line == 3


def test_table_shaped_counts_load(tmp_path):
    rows = ["ref,kind,name,context,type,label"]
    rows += [f"c{i},Comment,sensitive note {i},,,Sens" for i in range(15)]
    rows += [f"p{i},Comment,plain note {i},,,NonSens" for i in range(988)]
    path = tmp_path / "comments.csv"
    path.write_text("\n".join(rows) + "\n")
    records = load_element_dataset(path)
    sens = sum(1 for r in records if r.label == "Sens")
    assert (sens, len(records) - sens) == (15, 988)


def test_flow_dataset_round_trip(tmp_path):
    serializations, labels = generate_flow_dataset(6, 10, seed=6)
    path = tmp_path / "flows.jsonl"
    save_flow_dataset(serializations, labels, path)
    loaded_ser, loaded_labels = load_flow_dataset(path)
    assert loaded_ser == serializations
    assert loaded_labels == labels


def test_flow_dataset_rejects_bad_label(tmp_path):
    path = tmp_path / "flows.jsonl"
    path.write_text('{"serialization": "CWE-1|x", "label": "Perhaps"}\n')
    with pytest.raises(SchemaViolation):
        load_flow_dataset(path)
