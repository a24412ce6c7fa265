"""Command-line interface: scan, train, bench, gen-bench, verify-flows."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .embeddings import DEFAULT_PROVIDER_ID, get_provider
from .errors import ExposcanError
from .harness import (
    generate_benchmark,
    load_benchmark,
    load_element_dataset,
    load_flow_dataset,
    score_run,
    write_benchmark,
)
from .learning import SearchSpace
from .pipeline import (
    FLOW_MODEL_FILE,
    ScanConfig,
    dump_ir,
    load_flow_verifier,
    parse_corpus,
    run_scan,
    scan_units,
)
from .report import (
    plot_verification_comparison,
    render_comparison,
    render_text_table,
    write_report_files,
)
from .surface import TASK_KINDS
from .tasks import train_element_task, train_flow_model, train_surface_models
from .verification import verify_flow
from . import verification


def _read_config_file(path: str) -> dict[str, str]:
    """key=value lines; '#' starts a comment."""
    values: dict[str, str] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise click.BadParameter(f"config line without '=': {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _space_from_options(trials: int | None, folds: int | None) -> SearchSpace | None:
    if trials is None and folds is None:
        return None
    space = SearchSpace()
    if trials is not None:
        space.trials = trials
    if folds is not None:
        space.folds = folds
    return space


@click.group()
@click.version_option()
def main() -> None:
    """Static analysis for CWE-200 sensitive-information exposure in Java."""


@main.command()
@click.argument("inputs", nargs=-1, required=True,
                type=click.Path(exists=True))
@click.option("--provider", default=DEFAULT_PROVIDER_ID, show_default=True,
              help="Embedding provider id ('bridge' for an external process).")
@click.option("--bridge-cmd", envvar="EXPOSCAN_BRIDGE_CMD", default=None,
              help="Command starting a stdio bridge provider.")
@click.option("--bridge-addr", envvar="EXPOSCAN_BRIDGE_ADDR", default=None,
              help="host:port of a TCP bridge provider.")
@click.option("--model-dir", type=click.Path(), default=None)
@click.option("--cwe", "cwes", multiple=True, type=int,
              help="Restrict to these CWE ids (repeatable).")
@click.option("--source-threshold", type=float, default=0.5, show_default=True)
@click.option("--sink-threshold", type=float, default=0.5, show_default=True)
@click.option("--verdict-threshold", type=float, default=0.5, show_default=True)
@click.option("--max-flow-depth", type=int, default=150, show_default=True)
@click.option("--format", "output_format", default="sarif", show_default=True,
              type=click.Choice(["sarif", "json", "text"]))
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--rules-only", is_flag=True,
              help="Lexicon + rule-list surface; no models or provider needed.")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="key=value file supplying defaults for the options above.")
@click.option("-o", "--output", type=click.Path(), default=None)
@click.option("--dump-ir", "dump_ir_path", type=click.Path(), default=None)
@click.option("--emit-surface", type=click.Path(), default=None)
@click.option("--emit-flows", type=click.Path(), default=None)
@click.option("--emit-verified", type=click.Path(), default=None)
@click.pass_context
def scan(ctx: click.Context, inputs, provider, bridge_cmd, bridge_addr, model_dir,
         cwes, source_threshold, sink_threshold, verdict_threshold, max_flow_depth,
         output_format, seed, rules_only, config_path, output, dump_ir_path,
         emit_surface, emit_flows, emit_verified) -> None:
    """Scan .java files or directories; exit 0 clean, 1 findings, 2 error."""
    if config_path:
        overrides = _read_config_file(config_path)
        casts = {"source_threshold": float, "sink_threshold": float,
                 "verdict_threshold": float, "max_flow_depth": int, "seed": int,
                 "rules_only": lambda v: v.lower() in ("1", "true", "yes")}
        for key, value in overrides.items():
            if ctx.get_parameter_source(key) == click.core.ParameterSource.DEFAULT:
                ctx.params[key] = casts.get(key, str)(value)
        provider = ctx.params.get("provider", provider)
        model_dir = ctx.params.get("model_dir", model_dir)
        source_threshold = ctx.params.get("source_threshold", source_threshold)
        sink_threshold = ctx.params.get("sink_threshold", sink_threshold)
        verdict_threshold = ctx.params.get("verdict_threshold", verdict_threshold)
        max_flow_depth = ctx.params.get("max_flow_depth", max_flow_depth)
        seed = ctx.params.get("seed", seed)
        rules_only = ctx.params.get("rules_only", rules_only)
        output_format = ctx.params.get("output_format", output_format)

    config = ScanConfig(
        input_paths=list(inputs),
        provider_id=provider,
        model_dir=model_dir,
        cwe_filter=list(cwes) or None,
        source_threshold=source_threshold,
        sink_threshold=sink_threshold,
        verdict_threshold=verdict_threshold,
        max_flow_depth=max_flow_depth,
        output_format=output_format,
        seed=seed,
        rules_only=rules_only,
        bridge_command=bridge_cmd,
        bridge_address=bridge_addr,
    )
    try:
        result = run_scan(config)
    except ExposcanError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)

    if dump_ir_path:
        Path(dump_ir_path).write_text(dump_ir(result.units), encoding="utf-8")
    if emit_surface:
        surface = [f.to_record() for f in result.sources] + \
                  [f.to_record() for f in result.sinks]
        Path(emit_surface).write_text(
            json.dumps(surface, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    if emit_flows:
        Path(emit_flows).write_text(
            json.dumps([t.to_record() for t in result.traces], indent=2,
                       sort_keys=True) + "\n", encoding="utf-8")
    if emit_verified:
        rows = []
        for trace, verdict in zip(result.verified, result.verdicts):
            row = trace.to_record()
            if verdict is not None:
                row["probability"] = round(verdict.probability, 6)
            rows.append(row)
        Path(emit_verified).write_text(
            json.dumps(rows, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    if output_format == "sarif":
        text = result.sarif_json()
    elif output_format == "json":
        text = json.dumps([t.to_record() for t in result.verified],
                          indent=2, sort_keys=True) + "\n"
    else:
        lines = [
            f"CWE-{t.cwe_id} {t.sink_file}:{t.sink_line} "
            f"{t.source.element.name} ({t.source.category.value})"
            for t in result.verified
        ]
        text = "\n".join(lines) + ("\n" if lines else "no findings\n")
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)
    sys.exit(result.exit_code)


@main.command()
@click.argument("dataset", type=click.Path(exists=True))
@click.option("--task", required=True, type=click.Choice(sorted(TASK_KINDS)))
@click.option("--provider", default=DEFAULT_PROVIDER_ID, show_default=True)
@click.option("--bridge-cmd", envvar="EXPOSCAN_BRIDGE_CMD", default=None)
@click.option("--bridge-addr", envvar="EXPOSCAN_BRIDGE_ADDR", default=None)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--trials", type=int, default=None,
              help="Search trial budget (defaults to the full 50).")
@click.option("--folds", type=int, default=None)
@click.option("--out-dir", type=click.Path(), default="models", show_default=True)
def train(dataset, task, provider, bridge_cmd, bridge_addr, seed, trials, folds,
          out_dir) -> None:
    """Train one classifier from a labeled dataset; write model + report."""
    space = _space_from_options(trials, folds)
    provider_obj = get_provider(provider, bridge_command=bridge_cmd,
                                bridge_address=bridge_addr)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        if task == "flows":
            serializations, labels = load_flow_dataset(dataset)
            result = train_flow_model(out, provider_obj, seed=seed, space=space,
                                      serializations=serializations, labels=labels)
            model_file = out / FLOW_MODEL_FILE
        else:
            records = load_element_dataset(dataset)
            result = train_element_task(records, task, provider_obj, seed=seed,
                                        space=space)
            from .pipeline import SURFACE_MODEL_FILES

            model_file = out / SURFACE_MODEL_FILES[task]
            result.model.save(model_file)
    except ExposcanError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    report = {
        "task": task,
        "provider": provider_obj.descriptor.id,
        "seed": seed,
        "modelFile": model_file.name,
        **result.report(),
    }
    report_path = out / f"{task}.train-report.json"
    report_path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n",
                           encoding="utf-8")
    m = result.metrics
    click.echo(f"trained {task}: test F1 {m.f1:.4f} precision {m.precision:.4f} "
               f"recall {m.recall:.4f} ({len(result.trials)} trials)")
    click.echo(f"model: {model_file}")
    click.echo(f"report: {report_path}")


@main.command("gen-bench")
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--per-cwe", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--paper-shape", is_flag=True,
              help="Reproduce the published per-CWE GOOD/BAD counts.")
def gen_bench(out_dir, per_cwe, seed, paper_shape) -> None:
    """Generate the GOOD/BAD benchmark tree plus manifest.json."""
    cases = generate_benchmark(per_cwe=per_cwe, seed=seed, paper_shape=paper_shape)
    out = write_benchmark(cases, out_dir)
    n_bad = sum(1 for c in cases if c.polarity == "BAD")
    click.echo(f"wrote {len(cases)} cases ({n_bad} BAD) under {out}")


@main.command()
@click.option("--bench-dir", type=click.Path(exists=True), default=None)
@click.option("--generate", "do_generate", is_flag=True,
              help="Generate a fresh benchmark instead of loading one.")
@click.option("--per-cwe", type=int, default=10, show_default=True)
@click.option("--paper-shape", is_flag=True)
@click.option("--model-dir", type=click.Path(), default=None)
@click.option("--rules-only", is_flag=True)
@click.option("--provider", default=DEFAULT_PROVIDER_ID, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--trials", type=int, default=6, show_default=True,
              help="Search budget when models must be trained here.")
@click.option("--out-dir", type=click.Path(), default="bench-report", show_default=True)
def bench(bench_dir, do_generate, per_cwe, paper_shape, model_dir, rules_only,
          provider, seed, trials, out_dir) -> None:
    """Score the pipeline on the benchmark, verification off and on."""
    if bench_dir is None and not do_generate:
        raise click.UsageError("need --bench-dir or --generate")
    cases = (generate_benchmark(per_cwe=per_cwe, seed=seed, paper_shape=paper_shape)
             if bench_dir is None else load_benchmark(bench_dir))
    named = [(rel, content) for case in cases for rel, content in case.files.items()]
    units, warnings = parse_corpus(named)

    provider_obj = None if rules_only else get_provider(provider)
    space = SearchSpace(trials=trials, folds=3)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    surface_models = None
    flow_verifier = None
    if not rules_only:
        from .pipeline import load_surface_models

        model_path = Path(model_dir) if model_dir else out / "models"
        if not (model_path / "variables.model.json").exists():
            click.echo(f"training surface models into {model_path} "
                       f"({space.trials} trials each)...")
            train_surface_models(model_path, provider_obj, seed=seed, space=space)
        surface_models = load_surface_models(model_path)
        if not (model_path / FLOW_MODEL_FILE).exists():
            click.echo("training flow verifier...")
            train_flow_model(model_path, provider_obj, seed=seed, space=space)
        flow_verifier = load_flow_verifier(model_path)

    config = ScanConfig(input_paths=["."], rules_only=rules_only,
                        model_dir=model_dir or str(out / "models"), seed=seed,
                        provider_id=provider)
    if rules_only:
        config.model_dir = None

    result_off = scan_units(units, config, provider=provider_obj,
                            surface_models=surface_models, flow_verifier=None,
                            warnings=warnings, apply_verification=False)
    report_off = score_run(result_off.verified, cases)
    result_on = scan_units(units, config, provider=provider_obj,
                           surface_models=surface_models,
                           flow_verifier=flow_verifier, warnings=warnings,
                           apply_verification=flow_verifier is not None)
    report_on = score_run(result_on.verified, cases)

    click.echo(render_text_table(report_off, "Without verification"))
    click.echo("")
    click.echo(render_text_table(report_on, "With verification"))
    click.echo("")
    click.echo(render_comparison(report_off, report_on))
    write_report_files(report_off, out, "report-without-verification",
                       "Without verification")
    write_report_files(report_on, out, "report-with-verification",
                       "With verification")
    plot_verification_comparison(report_off, report_on, out / "verification-impact.png")
    click.echo(f"\nreports written under {out}")


@main.command("verify-flows")
@click.argument("flows_file", type=click.Path(exists=True))
@click.option("--model-dir", type=click.Path(exists=True), required=True)
@click.option("--provider", default=DEFAULT_PROVIDER_ID, show_default=True)
@click.option("--bridge-cmd", envvar="EXPOSCAN_BRIDGE_CMD", default=None)
@click.option("--bridge-addr", envvar="EXPOSCAN_BRIDGE_ADDR", default=None)
@click.option("--threshold", type=float, default=0.5, show_default=True)
@click.option("-o", "--output", type=click.Path(), default=None)
def verify_flows(flows_file, model_dir, provider, bridge_cmd, bridge_addr,
                 threshold, output) -> None:
    """Score a JSON-lines flow dataset with a trained verifier."""
    pair = load_flow_verifier(model_dir)
    if pair is None:
        click.echo(f"error: no {FLOW_MODEL_FILE} in {model_dir}", err=True)
        sys.exit(2)
    model, aggregator = pair
    provider_obj = get_provider(provider, bridge_command=bridge_cmd,
                                bridge_address=bridge_addr)
    serializations, labels = load_flow_dataset(flows_file)
    rows = []
    for serialization, label in zip(serializations, labels):
        flow = verification.EnrichedFlow(
            0, [], serialization, verification.flow_digest(serialization))
        verdict = verify_flow(flow, model, provider_obj, aggregator, threshold)
        rows.append({
            "digest": flow.digest_hex,
            "label": "Yes" if label else "No",
            "probability": round(verdict.probability, 6),
            "verdict": "Yes" if verdict.is_true_positive else "No",
        })
    text = "\n".join(json.dumps(row, sort_keys=True) for row in rows) + "\n"
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


if __name__ == "__main__":
    main()
