"""SARIF 2.1.0 report assembly and validation."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import PurePosixPath

import jsonschema

from . import __version__
from .flows.reach import FlowTrace
from .verification import Verdict

SARIF_VERSION = "2.1.0"
SARIF_SCHEMA_URI = "https://docs.oasis-open.org/sarif/sarif/v2.1.0/errata01/os/schemas/sarif-schema-2.1.0.json"

CWE_TITLES = {
    200: "Exposure of Sensitive Information to an Unauthorized Actor",
    201: "Insertion of Sensitive Information Into Sent Data",
    203: "Observable Discrepancy",
    204: "Observable Response Discrepancy",
    208: "Observable Timing Discrepancy",
    209: "Generation of Error Message Containing Sensitive Information",
    214: "Invocation of Process Using Visible Sensitive Information",
    215: "Insertion of Sensitive Information Into Debugging Code",
    532: "Insertion of Sensitive Information into Log File",
    535: "Exposure of Information Through Shell Error Message",
    536: "Servlet Runtime Error Message Containing Sensitive Information",
    537: "Java Runtime Error Message Containing Sensitive Information",
    538: "Insertion of Sensitive Information into Externally-Accessible File or Directory",
    550: "Server-generated Error Message Containing Sensitive Information",
    598: "Use of GET Request Method With Sensitive Query Strings",
    615: "Inclusion of Sensitive Information in Source Code Comments",
}


def _uri(path: str) -> str:
    return str(PurePosixPath(str(path).replace("\\", "/")))


def _location(file: str, start_line: int, end_line: int, message: str | None = None) -> dict:
    loc = {
        "physicalLocation": {
            "artifactLocation": {"uri": _uri(file)},
            "region": {"startLine": int(start_line), "endLine": int(max(start_line, end_line))},
        }
    }
    if message:
        loc["message"] = {"text": message}
    return loc


def _result(trace: FlowTrace, rule_index: dict[str, int],
            verdict: Verdict | None) -> dict:
    rule_id = trace.rule_id or f"CWE-{trace.cwe_id}"
    source = trace.source.element
    if trace.sink is not None:
        sink_name = trace.sink.element.qualified_name or trace.sink.element.name
        sink_detail = f"{trace.sink.sink_kind.value} sink {sink_name}"
    else:
        sink_detail = trace.site.kind if trace.site else "structural site"
    message = (
        f"{CWE_TITLES.get(trace.cwe_id, rule_id)}: {source.kind.value} "
        f"'{source.name}' ({trace.source.category.value}) reaches {sink_detail} "
        f"at {_uri(trace.sink_file)}:{trace.sink_line}."
    )
    thread_locations = [
        {"location": _location(step.file, step.line, step.end_line,
                               f"{step.node_kind}: {step.label}")}
        for step in trace.steps
    ]
    result = {
        "ruleId": rule_id,
        "ruleIndex": rule_index[rule_id],
        "level": "warning",
        "message": {"text": message},
        "locations": [_location(trace.sink_file, trace.sink_line, trace.sink_line)],
        "relatedLocations": [
            _location(source.file, source.start_line, source.end_line,
                      f"source {source.name}")
        ],
        "codeFlows": [{"threadFlows": [{"locations": thread_locations}]}],
        "properties": {
            "category": trace.source.category.value,
            "sourceName": source.name,
            "intermediateSteps": trace.intermediate_steps,
        },
    }
    if trace.sink is not None:
        result["properties"]["sinkKind"] = trace.sink.sink_kind.value
    if verdict is not None:
        result["properties"]["probability"] = round(verdict.probability, 6)
    return result


def build_sarif(traces: list[FlowTrace],
                verdicts: list[Verdict | None] | None = None,
                provider_id: str = "", seed: int = 0, exit_code: int = 0,
                warnings: list[str] | None = None) -> dict:
    """Assemble a deterministic SARIF log: stable ordering, no timestamps."""
    verdicts = verdicts or [None] * len(traces)
    order = sorted(
        range(len(traces)),
        key=lambda i: (traces[i].rule_id or "", _uri(traces[i].sink_file),
                       traces[i].sink_line, traces[i].source.element.name),
    )
    rule_ids = sorted({traces[i].rule_id or f"CWE-{traces[i].cwe_id}" for i in order})
    rule_index = {rule_id: idx for idx, rule_id in enumerate(rule_ids)}
    rules = [
        {
            "id": rule_id,
            "name": rule_id.replace("-", ""),
            "shortDescription": {
                "text": CWE_TITLES.get(int(rule_id.split("-")[1]), rule_id)
            },
            "helpUri": f"https://cwe.mitre.org/data/definitions/{rule_id.split('-')[1]}.html",
        }
        for rule_id in rule_ids
    ]
    invocation = {"executionSuccessful": exit_code != 2, "exitCode": exit_code}
    if warnings:
        invocation["toolExecutionNotifications"] = [
            {"level": "warning", "message": {"text": note}} for note in sorted(warnings)
        ]
    return {
        "$schema": SARIF_SCHEMA_URI,
        "version": SARIF_VERSION,
        "runs": [
            {
                "tool": {
                    "driver": {
                        "name": "exposcan",
                        "version": __version__,
                        "informationUri": "https://example.invalid/exposcan",
                        "rules": rules,
                    }
                },
                "invocations": [invocation],
                "results": [_result(traces[i], rule_index, verdicts[i]) for i in order],
                "columnKind": "utf16CodeUnits",
                "properties": {"providerId": provider_id, "seed": seed},
            }
        ],
    }


def sarif_to_json(log: dict) -> str:
    return json.dumps(log, indent=2, sort_keys=True) + "\n"


def load_schema() -> dict:
    data = resources.files("exposcan").joinpath(
        "data", "sarif-2.1.0-subset.schema.json").read_text(encoding="utf-8")
    return json.loads(data)


def validate_sarif(log: dict) -> None:
    """Raises jsonschema.ValidationError when the log is malformed."""
    jsonschema.validate(log, load_schema(),
                        format_checker=jsonschema.FormatChecker())
