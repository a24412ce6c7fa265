"""Rendering of benchmark score reports: text table, CSV, JSON, figures.

The figure path uses matplotlib's Agg backend and writes PNGs next to the
delimited output, one bar chart of per-CWE scores and, when both runs are
supplied, a verification on/off comparison.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .harness.scoring import ScoreReport  # noqa: E402

_COLUMNS = ("CWE", "GOOD", "BAD", "Total", "Precision", "Recall", "F1 Score")


def _pct(value: float) -> str:
    return f"{100.0 * value:.2f}"


def _table_rows(report: ScoreReport) -> list[tuple[str, ...]]:
    rows = []
    for row in report.rows:
        m = row.metrics
        rows.append((str(row.cwe_id), str(row.n_good), str(row.n_bad),
                     str(row.total), _pct(m.precision), _pct(m.recall), _pct(m.f1)))
    t = report.totals
    rows.append(("Total", str(report.n_good), str(report.n_bad),
                 str(report.n_good + report.n_bad),
                 _pct(t.precision), _pct(t.recall), _pct(t.f1)))
    return rows


def render_text_table(report: ScoreReport, title: str = "") -> str:
    rows = [_COLUMNS] + _table_rows(report)
    widths = [max(len(row[i]) for row in rows) for i in range(len(_COLUMNS))]
    lines = []
    if title:
        lines.append(title)
    sep = "-+-".join("-" * w for w in widths)
    for i, row in enumerate(rows):
        lines.append(" | ".join(cell.rjust(w) for cell, w in zip(row, widths)))
        if i == 0:
            lines.append(sep)
    return "\n".join(lines)


def render_comparison(off: ScoreReport, on: ScoreReport) -> str:
    """Side-by-side metric block for verification off vs on."""
    headers = ("Metric", "Without Verification", "With Verification")
    body = [
        ("Precision", _pct(off.totals.precision), _pct(on.totals.precision)),
        ("Recall", _pct(off.totals.recall), _pct(on.totals.recall)),
        ("F1 Score", _pct(off.totals.f1), _pct(on.totals.f1)),
        ("Accuracy", _pct(off.totals.accuracy), _pct(on.totals.accuracy)),
    ]
    rows = [headers] + body
    widths = [max(len(row[i]) for row in rows) for i in range(3)]
    out = []
    for i, row in enumerate(rows):
        out.append(" | ".join(cell.ljust(w) for cell, w in zip(row, widths)))
        if i == 0:
            out.append("-+-".join("-" * w for w in widths))
    return "\n".join(out)


def render_csv(report: ScoreReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(_COLUMNS)
    for row in _table_rows(report):
        writer.writerow(row)
    return buffer.getvalue()


def write_report_files(report: ScoreReport, out_dir: str | Path,
                       stem: str = "report", title: str = "",
                       figures: bool = True) -> dict[str, Path]:
    """Write <stem>.json, <stem>.csv, <stem>.txt and a per-CWE figure."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "json": out / f"{stem}.json",
        "csv": out / f"{stem}.csv",
        "txt": out / f"{stem}.txt",
    }
    paths["json"].write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8")
    paths["csv"].write_text(render_csv(report), encoding="utf-8")
    paths["txt"].write_text(render_text_table(report, title) + "\n", encoding="utf-8")
    if figures:
        paths["png"] = out / f"{stem}.png"
        plot_per_cwe(report, paths["png"], title)
    return paths


def plot_per_cwe(report: ScoreReport, path: str | Path, title: str = "") -> None:
    labels = [f"CWE-{row.cwe_id}" for row in report.rows]
    precision = [row.metrics.precision for row in report.rows]
    recall = [row.metrics.recall for row in report.rows]
    f1 = [row.metrics.f1 for row in report.rows]
    x = range(len(labels))
    width = 0.27
    fig, ax = plt.subplots(figsize=(max(7, len(labels) * 0.8), 4.0))
    ax.bar([i - width for i in x], precision, width, label="Precision")
    ax.bar(list(x), recall, width, label="Recall")
    ax.bar([i + width for i in x], f1, width, label="F1")
    ax.set_xticks(list(x))
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("score")
    if title:
        ax.set_title(title)
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_verification_comparison(off: ScoreReport, on: ScoreReport,
                                 path: str | Path) -> None:
    metrics = ("precision", "recall", "f1", "accuracy")
    off_vals = [getattr(off.totals, m) for m in metrics]
    on_vals = [getattr(on.totals, m) for m in metrics]
    x = range(len(metrics))
    width = 0.35
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    ax.bar([i - width / 2 for i in x], off_vals, width, label="without verification")
    ax.bar([i + width / 2 for i in x], on_vals, width, label="with verification")
    ax.set_xticks(list(x))
    ax.set_xticklabels([m.capitalize() for m in metrics])
    ax.set_ylim(0.0, 1.05)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
