"""Step II: taint-flow graph construction, reachability, CWE rule templates."""

from .graph import EdgeKind, FlowEdge, FlowGraph, FlowNode, GuardInfo, build_flow_graph
from .reach import (
    DEFAULT_MAX_DEPTH,
    FlowStep,
    FlowTrace,
    SiteRef,
    reachable,
    reachable_flows,
    shortest_path,
)
from .rules import (
    BENCHMARK_CWES,
    DEFAULT_RULESET,
    KNOWN_CWE_IDS,
    CweRule,
    apply_cwe_rules,
    detect_comment_exposure,
    detect_discrepancies,
    is_runtime_exception,
)

__all__ = [
    "BENCHMARK_CWES",
    "DEFAULT_MAX_DEPTH",
    "DEFAULT_RULESET",
    "KNOWN_CWE_IDS",
    "CweRule",
    "EdgeKind",
    "FlowEdge",
    "FlowGraph",
    "FlowNode",
    "FlowStep",
    "FlowTrace",
    "GuardInfo",
    "SiteRef",
    "apply_cwe_rules",
    "build_flow_graph",
    "detect_comment_exposure",
    "detect_discrepancies",
    "is_runtime_exception",
    "reachable",
    "reachable_flows",
    "shortest_path",
]
