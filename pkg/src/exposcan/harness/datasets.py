"""Dataset files: element records as CSV, labeled flows as JSON lines."""

from __future__ import annotations

import csv
import json
from pathlib import Path

from ..errors import SchemaViolation
from .generate import LabeledElementRecord

CSV_HEADER = ["ref", "kind", "name", "context", "type", "label"]

_ELEMENT_LABELS = {
    "Variable": {"Sens", "NonSens"},
    "StringLiteral": {"Sens", "NonSens"},
    "Comment": {"Sens", "NonSens"},
    "ApiCall": {"Sink", "NonSink"},
}
_KIND_VALUES = set(_ELEMENT_LABELS)
_EIGHT_WAY_LABELS = {
    "PrintOutput", "Logging", "ErrorMessage", "ServletResponse", "FileWrite",
    "NetworkSend", "ProcessInvocation", "QueryStringBuild",
    "AuthCredentials", "PII", "Financial", "SensitiveFilesPaths",
    "SystemConfig", "SecurityEncryption", "AppSpecific", "QueryParameters",
}


def save_element_dataset(records: list[LabeledElementRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_HEADER)
        for record in records:
            writer.writerow(record.row())


def load_element_dataset(path: str | Path) -> list[LabeledElementRecord]:
    """Validated element records; malformed rows raise with their line number."""
    records: list[LabeledElementRecord] = []
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaViolation(1, "empty file, expected a header row") from None
        if header != CSV_HEADER:
            raise SchemaViolation(1, f"bad header {header!r}, expected {CSV_HEADER!r}")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(CSV_HEADER):
                raise SchemaViolation(line_no, f"expected {len(CSV_HEADER)} columns, got {len(row)}")
            ref, kind, name, context, type_name, label = row
            if kind not in _KIND_VALUES:
                raise SchemaViolation(line_no, f"unknown kind {kind!r}")
            allowed = _ELEMENT_LABELS[kind] | _EIGHT_WAY_LABELS
            if label not in allowed:
                raise SchemaViolation(line_no, f"label {label!r} not allowed for {kind}")
            if not name.strip():
                raise SchemaViolation(line_no, "empty name")
            records.append(LabeledElementRecord(ref, kind, name, context, type_name, label))
    return records


def save_flow_dataset(serializations: list[str], labels: list[int],
                      path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for serialization, label in zip(serializations, labels):
            handle.write(json.dumps(
                {"serialization": serialization, "label": "Yes" if label else "No"},
                ensure_ascii=False) + "\n")


def load_flow_dataset(path: str | Path) -> tuple[list[str], list[int]]:
    """JSON-lines flows: {"serialization": str, "label": "Yes"|"No"}."""
    serializations: list[str] = []
    labels: list[int] = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaViolation(line_no, f"not valid JSON: {exc}") from None
            if not isinstance(row, dict) or "serialization" not in row:
                raise SchemaViolation(line_no, "missing 'serialization'")
            label = row.get("label")
            if label not in ("Yes", "No"):
                raise SchemaViolation(line_no, f"label must be Yes or No, got {label!r}")
            serializations.append(str(row["serialization"]))
            labels.append(1 if label == "Yes" else 0)
    return serializations, labels
