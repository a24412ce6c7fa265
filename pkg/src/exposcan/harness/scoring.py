"""Score pipeline detections against benchmark expectations, per CWE."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import PurePosixPath

from ..errors import UnknownFile
from ..flows.reach import FlowTrace
from ..flows.rules import BENCHMARK_CWES
from ..learning.metrics import Metrics, from_counts
from .generate import BenchmarkCase

LINE_TOLERANCE = 2


def _norm(path: str) -> str:
    return str(PurePosixPath(str(path).replace("\\", "/")))


def file_matches(detection_file: str, case_file: str) -> bool:
    """Suffix match so absolute scan paths line up with manifest paths."""
    det = _norm(detection_file)
    rel = _norm(case_file)
    return det == rel or det.endswith("/" + rel)


@dataclass
class CweScore:
    cwe_id: int
    n_good: int
    n_bad: int
    metrics: Metrics

    @property
    def total(self) -> int:
        return self.n_good + self.n_bad

    def to_dict(self) -> dict:
        return {
            "cwe": self.cwe_id,
            "good": self.n_good,
            "bad": self.n_bad,
            "total": self.total,
            **self.metrics.to_dict(),
        }


@dataclass
class ScoreReport:
    rows: list[CweScore]
    totals: Metrics
    n_good: int
    n_bad: int

    def to_dict(self) -> dict:
        return {
            "perCwe": [row.to_dict() for row in self.rows],
            "totals": {
                "good": self.n_good,
                "bad": self.n_bad,
                "total": self.n_good + self.n_bad,
                **self.totals.to_dict(),
            },
        }


def score_run(detections: list[FlowTrace], cases: list[BenchmarkCase],
              tolerance: int = LINE_TOLERANCE) -> ScoreReport:
    """Table-style scoring: per-CWE counts plus micro-averaged totals.

    A BAD case is a true positive when any detection shares its CWE and
    file and lands within the line tolerance of an expected sink. A GOOD
    case with any same-CWE detection in its files is a false positive.
    Detection order never matters.
    """
    case_files = [(case, rel) for case in cases for rel in case.files]
    for detection in detections:
        if not any(file_matches(detection.sink_file, rel) for _, rel in case_files):
            raise UnknownFile(detection.sink_file)

    rows: list[CweScore] = []
    order = [cwe for cwe in BENCHMARK_CWES]
    extra = sorted({case.cwe_id for case in cases} - set(order))
    for cwe in order + extra:
        cwe_cases = [case for case in cases if case.cwe_id == cwe]
        if not cwe_cases:
            continue
        n_good = sum(1 for case in cwe_cases if case.polarity == "GOOD")
        n_bad = len(cwe_cases) - n_good
        tp = fp = 0
        for case in cwe_cases:
            relevant = [
                d for d in detections
                if d.cwe_id == cwe and any(file_matches(d.sink_file, rel)
                                           for rel in case.files)
            ]
            if case.polarity == "BAD":
                hit = any(
                    d.cwe_id == exp_cwe and file_matches(d.sink_file, exp_file)
                    and abs(d.sink_line - exp_line) <= tolerance
                    for d in relevant
                    for exp_cwe, exp_file, exp_line in case.expected
                )
                tp += 1 if hit else 0
            else:
                fp += 1 if relevant else 0
        fn = n_bad - tp
        tn = n_good - fp
        rows.append(CweScore(cwe, n_good, n_bad, from_counts(tp, fp, fn, tn)))

    tp = sum(r.metrics.tp for r in rows)
    fp = sum(r.metrics.fp for r in rows)
    fn = sum(r.metrics.fn for r in rows)
    tn = sum(r.metrics.tn for r in rows)
    totals = from_counts(tp, fp, fn, tn)
    return ScoreReport(rows, totals,
                       sum(r.n_good for r in rows), sum(r.n_bad for r in rows))
