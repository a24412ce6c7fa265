import json

import pytest
from click.testing import CliRunner

from exposcan.cli import main
from exposcan.harness import generate_benchmark, generate_element_dataset, write_benchmark
from exposcan.harness.datasets import save_element_dataset
from exposcan.sarif import validate_sarif


@pytest.fixture()
def runner():
    return CliRunner()


def _bench(tmp_path, cwes, per_cwe=1, seed=3):
    cases = [c for c in generate_benchmark(per_cwe=per_cwe, seed=seed)
             if c.cwe_id in cwes]
    return write_benchmark(cases, tmp_path / "bench")


def test_gen_bench_writes_tree_and_manifest(runner, tmp_path):
    out = tmp_path / "bench"
    result = runner.invoke(main, ["gen-bench", "--out", str(out), "--per-cwe", "1"])
    assert result.exit_code == 0, result.output
    assert (out / "manifest.json").exists()
    java_files = list(out.rglob("*.java"))
    assert len(java_files) == 28
    assert (out / "cwe-532" / "BAD" / "case_000").is_dir()


def test_scan_rules_only_exit_codes_and_sarif(runner, tmp_path):
    bench = _bench(tmp_path, {532})
    out_file = tmp_path / "report.sarif"
    result = runner.invoke(main, ["scan", str(bench), "--rules-only",
                                  "-o", str(out_file)])
    assert result.exit_code == 1
    log = json.loads(out_file.read_text())
    validate_sarif(log)
    assert log["runs"][0]["results"]

    empty = tmp_path / "empty"
    empty.mkdir()
    result = runner.invoke(main, ["scan", str(empty), "--rules-only"])
    assert result.exit_code == 0


def test_scan_cwe_filter(runner, tmp_path):
    bench = _bench(tmp_path, {598})
    result = runner.invoke(main, ["scan", str(bench), "--rules-only",
                                  "--cwe", "532", "--format", "json"])
    assert result.exit_code == 0
    assert json.loads(result.output) == []


def test_scan_emits_side_files(runner, tmp_path):
    bench = _bench(tmp_path, {537})
    ir = tmp_path / "ir.json"
    surface = tmp_path / "surface.json"
    flows = tmp_path / "flows.json"
    verified = tmp_path / "verified.json"
    result = runner.invoke(main, [
        "scan", str(bench), "--rules-only", "-o", str(tmp_path / "o.sarif"),
        "--dump-ir", str(ir), "--emit-surface", str(surface),
        "--emit-flows", str(flows), "--emit-verified", str(verified)])
    assert result.exit_code == 1
    assert json.loads(ir.read_text())
    assert json.loads(surface.read_text())
    assert json.loads(flows.read_text())
    assert json.loads(verified.read_text())


def test_scan_text_format(runner, tmp_path):
    bench = _bench(tmp_path, {615})
    result = runner.invoke(main, ["scan", str(bench), "--rules-only",
                                  "--format", "text"])
    assert result.exit_code == 1
    assert "CWE-615" in result.output


def test_scan_error_exit_two(runner, tmp_path):
    bench = _bench(tmp_path, {532})
    # learned mode demands a model directory; its absence is a config error
    result = runner.invoke(main, ["scan", str(bench)])
    assert result.exit_code == 2
    assert "error" in result.output


def test_scan_config_file_defaults(runner, tmp_path):
    bench = _bench(tmp_path, {532})
    config = tmp_path / "scan.conf"
    config.write_text("rules_only = true\nseed = 5\n# comment\n")
    result = runner.invoke(main, ["scan", str(bench), "--config", str(config),
                                  "--format", "text"])
    assert result.exit_code == 1


def test_scan_deterministic_bytes(runner, tmp_path):
    bench = _bench(tmp_path, {209, 615}, per_cwe=2)
    out_a = tmp_path / "a.sarif"
    out_b = tmp_path / "b.sarif"
    for out in (out_a, out_b):
        result = runner.invoke(main, ["scan", str(bench), "--rules-only",
                                      "--seed", "4", "-o", str(out)])
        assert result.exit_code == 1
    assert out_a.read_bytes() == out_b.read_bytes()


def test_train_reduced_budget_and_determinism(runner, tmp_path):
    records = generate_element_dataset("comments", 24, 48, seed=5)
    dataset = tmp_path / "comments.csv"
    save_element_dataset(records, dataset)
    reports = []
    for attempt in ("one", "two"):
        out_dir = tmp_path / attempt
        result = runner.invoke(main, ["train", str(dataset), "--task", "comments",
                                      "--seed", "9", "--trials", "3",
                                      "--folds", "2", "--out-dir", str(out_dir)])
        assert result.exit_code == 0, result.output
        assert (out_dir / "comments.model.json").exists()
        reports.append((out_dir / "comments.train-report.json").read_bytes())
    assert reports[0] == reports[1]
    report = json.loads(reports[0])
    assert report["trialCount"] == 3
    assert report["testMetrics"]["f1"] >= 0.9


def test_train_full_search_runs_fifty_trials(runner, tmp_path):
    records = generate_element_dataset("comments", 20, 40, seed=6)
    dataset = tmp_path / "comments.csv"
    save_element_dataset(records, dataset)
    out_dir = tmp_path / "models"
    result = runner.invoke(main, ["train", str(dataset), "--task", "comments",
                                  "--seed", "2", "--folds", "2",
                                  "--out-dir", str(out_dir)])
    assert result.exit_code == 0, result.output
    report = json.loads((out_dir / "comments.train-report.json").read_text())
    assert report["trialCount"] == 50
    assert len(report["trials"]) == 50


def test_bench_rules_only_writes_reports_and_figures(runner, tmp_path):
    out_dir = tmp_path / "bench-out"
    result = runner.invoke(main, ["bench", "--generate", "--per-cwe", "1",
                                  "--rules-only", "--seed", "6",
                                  "--out-dir", str(out_dir)])
    assert result.exit_code == 0, result.output
    for stem in ("report-without-verification", "report-with-verification"):
        for ext in ("json", "csv", "txt", "png"):
            assert (out_dir / f"{stem}.{ext}").exists(), f"{stem}.{ext}"
    assert (out_dir / "verification-impact.png").stat().st_size > 0
    assert "Without verification" in result.output
    assert "With verification" in result.output
