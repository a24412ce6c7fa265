"""The CWE-200 family rule templates over taint traces and structural sites.

Flow rules constrain the sink kind and a structural guard at the sink node
(catch context, debug conditional, servlet class, server-error path). Two
rules are purely structural: observable response discrepancy (204) and
observable timing discrepancy (208) fire on branch/loop shapes over
sensitive comparisons rather than on taint paths. Their parent (203) fires
exactly when one of them does, and the root (200) tags any remaining
source-to-sink trace no specialized rule claims.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import UnknownCwe
from ..javasrc.model import CodeElement, ElementKind, Node, SourceUnit
from ..lexicon import SinkKind, rule_list_sink_kind
from ..surface import SourceFinding
from .graph import FlowGraph
from .reach import FlowStep, FlowTrace, SiteRef

ALL_SINK_KINDS = frozenset(SinkKind)

# Unqualified exception names considered RuntimeException or a subtype.
RUNTIME_EXCEPTION_TYPES = frozenset({
    "RuntimeException", "IllegalArgumentException", "IllegalStateException",
    "NullPointerException", "IndexOutOfBoundsException",
    "ArrayIndexOutOfBoundsException", "StringIndexOutOfBoundsException",
    "ArithmeticException", "ClassCastException", "NumberFormatException",
    "UnsupportedOperationException", "ConcurrentModificationException",
    "SecurityException", "NoSuchElementException", "NegativeArraySizeException",
})

KNOWN_CWE_IDS = frozenset(
    {200, 201, 203, 204, 208, 209, 214, 215, 532, 535, 536, 537, 538, 550, 598, 615})

# The fourteen leaf rules the benchmark exercises (Fig-1 leaves minus the
# root and the derived parent).
BENCHMARK_CWES = (201, 204, 208, 209, 214, 215, 532, 535, 536, 537, 538, 550, 598, 615)


@dataclass(frozen=True)
class CweRule:
    cwe_id: int
    rule_id: str
    requires_flow: bool
    allowed_sink_kinds: frozenset
    guard: str  # none | within_catch | within_catch_runtime | within_catch_servlet
    #             server_error | debug | error_or_catch | structural | derived | fallback


DEFAULT_RULESET: list[CweRule] = [
    CweRule(201, "CWE-201", True, frozenset({SinkKind.NETWORK_SEND}), "none"),
    CweRule(598, "CWE-598", True, frozenset({SinkKind.QUERY_STRING_BUILD}), "none"),
    CweRule(532, "CWE-532", True, frozenset({SinkKind.LOGGING}), "none"),
    CweRule(538, "CWE-538", True, frozenset({SinkKind.FILE_WRITE}), "none"),
    CweRule(214, "CWE-214", True, frozenset({SinkKind.PROCESS_INVOCATION}), "none"),
    CweRule(209, "CWE-209", True, ALL_SINK_KINDS, "error_or_catch"),
    CweRule(535, "CWE-535", True, frozenset({SinkKind.PROCESS_INVOCATION}), "within_catch"),
    CweRule(536, "CWE-536", True, frozenset({SinkKind.SERVLET_RESPONSE}),
            "within_catch_servlet"),
    CweRule(537, "CWE-537", True,
            frozenset({SinkKind.PRINT_OUTPUT, SinkKind.ERROR_MESSAGE}),
            "within_catch_runtime"),
    CweRule(550, "CWE-550", True,
            frozenset({SinkKind.ERROR_MESSAGE, SinkKind.SERVLET_RESPONSE}),
            "server_error"),
    CweRule(215, "CWE-215", True, ALL_SINK_KINDS, "debug"),
    CweRule(200, "CWE-200", True, ALL_SINK_KINDS, "fallback"),
    CweRule(204, "CWE-204", False, frozenset(), "structural"),
    CweRule(208, "CWE-208", False, frozenset(), "structural"),
    CweRule(203, "CWE-203", False, frozenset(), "derived"),
    CweRule(615, "CWE-615", False, frozenset(), "structural"),
]

_CANONICAL_SPECIFIC = [r for r in DEFAULT_RULESET
                       if r.requires_flow and r.guard != "fallback"]


def is_runtime_exception(type_name: str) -> bool:
    return type_name.split(".")[-1] in RUNTIME_EXCEPTION_TYPES


def _flow_rule_matches(rule: CweRule, trace: FlowTrace, graph: FlowGraph) -> bool:
    if trace.sink is None or not trace.steps:
        return False
    kind = trace.sink.sink_kind
    if rule.allowed_sink_kinds and kind not in rule.allowed_sink_kinds:
        return False
    guards = graph.nodes[trace.steps[-1].node_id].guards
    guard = rule.guard
    if guard == "none":
        return True
    if guard == "within_catch":
        return bool(guards.catch_types)
    if guard == "within_catch_runtime":
        return any(is_runtime_exception(t) for t in guards.catch_types)
    if guard == "within_catch_servlet":
        return bool(guards.catch_types) and guards.servlet_context
    if guard == "server_error":
        return guards.server_error_path
    if guard == "debug":
        return guards.debug_guarded
    if guard == "error_or_catch":
        return kind is SinkKind.ERROR_MESSAGE or bool(guards.catch_types)
    return False


def apply_cwe_rules(traces: list[FlowTrace], graph: FlowGraph,
                    ruleset: list[CweRule] | None = None) -> list[FlowTrace]:
    """Tag each raw trace with every flow rule it satisfies.

    The CWE-200 fallback is anchored to the canonical rule table, not the
    active ruleset: removing a rule from the active set never changes what
    the remaining rules tag.
    """
    ruleset = DEFAULT_RULESET if ruleset is None else ruleset
    for rule in ruleset:
        if rule.cwe_id not in KNOWN_CWE_IDS:
            raise UnknownCwe(f"CWE-{rule.cwe_id} is not part of the hierarchy")
    active_ids = {rule.cwe_id for rule in ruleset}
    tagged: list[FlowTrace] = []
    for trace in traces:
        for rule in ruleset:
            if not rule.requires_flow or rule.guard == "fallback":
                continue
            if _flow_rule_matches(rule, trace, graph):
                tagged.append(trace.tagged(rule.cwe_id, rule.rule_id))
        canonical_hit = any(_flow_rule_matches(rule, trace, graph)
                            for rule in _CANONICAL_SPECIFIC)
        if not canonical_hit and 200 in active_ids:
            tagged.append(trace.tagged(200, "CWE-200"))
    return tagged


def detect_comment_exposure(units: list[SourceUnit],
                            sources: list[SourceFinding]) -> list[FlowTrace]:
    """Sensitive comments become zero-step traces: source and sink coincide."""
    paths = {unit.path for unit in units}
    traces = []
    for finding in sources:
        element = finding.element
        if element.kind is not ElementKind.COMMENT or element.file not in paths:
            continue
        step = FlowStep(f"comment:{element.id}", element.file, element.start_line,
                        element.end_line, element.name[:60], "comment", None)
        site = SiteRef(element.file, element.start_line, element.end_line,
                       "comment", element.name[:60])
        traces.append(FlowTrace(615, "CWE-615", finding, [step], None, site))
    return traces


# ----------------------------------------------------------------------
# Structural rules: observable discrepancies (204/208) and their parent 203.

def _real_children(node: Node) -> list[Node]:
    return [c for c in node.children if c.kind != "text"]


def _identifier_names(node: Node) -> set[str]:
    names = set()
    for n in node.walk():
        if n.kind == "name":
            names.add(n.attrs["name"])
        elif n.kind == "fieldaccess":
            names.add(n.attrs["name"])
    return names


def _observable_outputs(node: Node,
                        call_elements: dict[int, CodeElement]) -> frozenset:
    """Descriptors of externally visible behavior inside a branch."""
    outs = set()
    for n in node.walk():
        if n.kind in ("call", "new"):
            element = call_elements.get(id(n))
            if element is None:
                continue
            kind = rule_list_sink_kind(element)
            if kind is None:
                continue
            literals = tuple(sorted(
                c.attrs["value"] for c in n.walk() if c.kind == "literal-str"))
            outs.add((kind.value, element.qualified_name or element.name, literals))
        elif n.kind == "return":
            literals = tuple(sorted(
                c.attrs["value"] for c in n.walk() if c.kind == "literal-str"))
            if literals:
                outs.add(("return", "return", literals))
    return frozenset(outs)


def _has_early_exit(node: Node) -> bool:
    return any(n.kind in ("return", "break", "continue") for n in node.walk())


_LOOP_KINDS = ("for", "foreach", "while", "dowhile")


def detect_discrepancies(units: list[SourceUnit], sources: list[SourceFinding],
                         elements_by_unit: dict[str, list[CodeElement]],
                         ruleset: list[CweRule] | None = None) -> list[FlowTrace]:
    """Find branch-discrepancy (204) and early-exit comparison (208) sites.

    CWE-203 mirrors every 204/208 site when present in the ruleset; it never
    fires on its own.
    """
    ruleset = DEFAULT_RULESET if ruleset is None else ruleset
    active_ids = {rule.cwe_id for rule in ruleset}
    sensitive: dict[str, dict[str, SourceFinding]] = {}
    for finding in sources:
        if finding.element.kind is ElementKind.VARIABLE:
            sensitive.setdefault(finding.element.file, {}).setdefault(
                finding.element.name, finding)

    traces: list[FlowTrace] = []
    seen_sites: set[tuple[str, int, int]] = set()

    def emit(cwe: int, finding: SourceFinding, site_kind: str, node: Node,
             file: str, detail: str) -> None:
        key = (file, node.start_line, cwe)
        if key in seen_sites:
            return
        seen_sites.add(key)
        step = FlowStep(f"site:{file}:{node.start}", file, node.start_line,
                        node.end_line, detail, "structural", None)
        site = SiteRef(file, node.start_line, node.end_line, site_kind, detail)
        if cwe in active_ids:
            traces.append(FlowTrace(cwe, f"CWE-{cwe}", finding, [step], None, site))
        if 203 in active_ids:
            traces.append(FlowTrace(203, "CWE-203", finding, [step], None, site))

    for unit in units:
        unit_sensitive = sensitive.get(unit.path)
        if not unit_sensitive:
            continue
        call_elements = {
            id(e.node): e
            for e in elements_by_unit.get(unit.path, [])
            if e.kind is ElementKind.API_CALL and e.node is not None
        }
        for method in unit.methods:
            if method.body is None:
                continue
            for node in method.body.walk():
                if node.kind == "if" and node.attrs.get("has_else"):
                    real = _real_children(node)
                    if len(real) < 3:
                        continue
                    cond, then_branch, else_branch = real[0], real[1], real[2]
                    hits = sorted(_identifier_names(cond) & set(unit_sensitive))
                    if not hits:
                        continue
                    then_outs = _observable_outputs(then_branch, call_elements)
                    else_outs = _observable_outputs(else_branch, call_elements)
                    if then_outs and else_outs and then_outs != else_outs:
                        emit(204, unit_sensitive[hits[0]], "branch-discrepancy",
                             node, unit.path, f"branches differ on {hits[0]}")
                elif node.kind in _LOOP_KINDS:
                    real = _real_children(node)
                    body = real[0] if node.kind == "dowhile" else real[-1]
                    for inner in body.walk():
                        if inner.kind != "if":
                            continue
                        inner_real = _real_children(inner)
                        if not inner_real:
                            continue
                        cond = inner_real[0]
                        hits = sorted(_identifier_names(cond) & set(unit_sensitive))
                        if not hits:
                            continue
                        if any(_has_early_exit(b) for b in inner_real[1:]):
                            emit(208, unit_sensitive[hits[0]], "early-exit",
                                 inner, unit.path, f"early exit on {hits[0]}")
    return traces
