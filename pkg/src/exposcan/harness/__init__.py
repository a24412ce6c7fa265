"""Benchmark generation, dataset I/O, and per-CWE scoring."""

from .datasets import (
    CSV_HEADER,
    load_element_dataset,
    load_flow_dataset,
    save_element_dataset,
    save_flow_dataset,
)
from .generate import (
    PAPER_SHAPE_COUNTS,
    BenchmarkCase,
    LabeledElementRecord,
    build_case,
    generate_benchmark,
    generate_element_dataset,
    generate_flow_dataset,
    load_benchmark,
    write_benchmark,
)
from .scoring import CweScore, ScoreReport, file_matches, score_run

__all__ = [
    "CSV_HEADER",
    "PAPER_SHAPE_COUNTS",
    "BenchmarkCase",
    "CweScore",
    "LabeledElementRecord",
    "ScoreReport",
    "build_case",
    "file_matches",
    "generate_benchmark",
    "generate_element_dataset",
    "generate_flow_dataset",
    "load_benchmark",
    "load_element_dataset",
    "load_flow_dataset",
    "save_element_dataset",
    "save_flow_dataset",
    "score_run",
    "write_benchmark",
]
