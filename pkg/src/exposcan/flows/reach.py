"""Breadth-first reachability between detected sources and sinks."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from ..surface import SinkFinding, SourceFinding
from .graph import EdgeKind, FlowGraph

DEFAULT_MAX_DEPTH = 150


@dataclass
class FlowStep:
    node_id: str
    file: str
    line: int
    end_line: int
    label: str
    node_kind: str
    in_edge: str | None  # EdgeKind value of the edge used to reach this step
    data_type: str = "unknown"


@dataclass
class SiteRef:
    """A structural sink site for rules that do not ride a taint path."""

    file: str
    line: int
    end_line: int
    kind: str  # comment | branch-discrepancy | early-exit
    detail: str


@dataclass
class FlowTrace:
    cwe_id: int | None
    rule_id: str | None
    source: SourceFinding
    steps: list[FlowStep]
    sink: SinkFinding | None = None
    site: SiteRef | None = None

    @property
    def sink_file(self) -> str:
        if self.sink is not None:
            return self.sink.element.file
        return self.site.file if self.site else self.source.element.file

    @property
    def sink_line(self) -> int:
        if self.steps and self.sink is not None:
            return self.steps[-1].line
        if self.sink is not None:
            return self.sink.element.start_line
        return self.site.line if self.site else self.source.element.start_line

    @property
    def intermediate_steps(self) -> int:
        return max(0, len(self.steps) - 2)

    def tagged(self, cwe_id: int, rule_id: str) -> "FlowTrace":
        return FlowTrace(cwe_id, rule_id, self.source, self.steps, self.sink, self.site)

    def to_record(self) -> dict:
        return {
            "cwe": self.cwe_id,
            "ruleId": self.rule_id,
            "source": {
                "file": self.source.element.file,
                "line": self.source.element.start_line,
                "name": self.source.element.name,
                "category": self.source.category.value,
            },
            "steps": [
                {"file": s.file, "line": s.line, "snippetRef": s.label}
                for s in self.steps
            ],
            "sink": (
                {
                    "file": self.sink.element.file,
                    "line": self.sink_line,
                    "name": self.sink.element.name,
                    "kind": self.sink.sink_kind.value,
                }
                if self.sink is not None
                else {
                    "file": self.site.file if self.site else "",
                    "line": self.site.line if self.site else 0,
                    "name": self.site.detail if self.site else "",
                    "kind": self.site.kind if self.site else "",
                }
            ),
        }


def shortest_path(graph: FlowGraph, start_ids: list[str], target_ids: set[str],
                  max_depth: int = DEFAULT_MAX_DEPTH) -> list[tuple[str, str | None]] | None:
    """Multi-source BFS; returns [(node_id, in_edge_kind)] or None.

    The first element's in-edge is None. Paths longer than max_depth edges
    are not reported.
    """
    if not start_ids or not target_ids:
        return None
    parent: dict[str, tuple[str | None, EdgeKind | None]] = {}
    queue: deque[tuple[str, int]] = deque()
    for start in start_ids:
        if start in graph.nodes and start not in parent:
            parent[start] = (None, None)
            queue.append((start, 0))
    hit: str | None = None
    for start in start_ids:
        if start in target_ids:
            hit = start
            break
    while queue and hit is None:
        current, depth = queue.popleft()
        if depth >= max_depth:
            continue
        for nxt, kind in graph.successors(current):
            if nxt in parent:
                continue
            parent[nxt] = (current, kind)
            if nxt in target_ids:
                hit = nxt
                queue.clear()
                break
            queue.append((nxt, depth + 1))
    if hit is None:
        return None
    path: list[tuple[str, str | None]] = []
    cursor: str | None = hit
    while cursor is not None:
        prev, kind = parent[cursor]
        path.append((cursor, kind.value if kind else None))
        cursor = prev
    path.reverse()
    return path


def reachable(graph: FlowGraph, src: str, dst: str,
              max_depth: int = DEFAULT_MAX_DEPTH) -> bool:
    return shortest_path(graph, [src], {dst}, max_depth) is not None


def _steps_from_path(graph: FlowGraph,
                     path: list[tuple[str, str | None]]) -> list[FlowStep]:
    steps = []
    for node_id, in_edge in path:
        node = graph.nodes[node_id]
        steps.append(FlowStep(node_id, node.file, node.line, node.end_line,
                              node.label, node.kind, in_edge, node.data_type))
    return steps


def reachable_flows(graph: FlowGraph, sources: list[SourceFinding],
                    sinks: list[SinkFinding],
                    max_depth: int = DEFAULT_MAX_DEPTH) -> list[FlowTrace]:
    """Shortest source-to-sink path per pair, as untagged traces.

    Comment sources carry no graph node and are handled by the comment
    exposure rule instead.
    """
    traces: list[FlowTrace] = []
    for source in sources:
        start_ids = graph.nodes_by_element.get(source.element.id, [])
        if not start_ids:
            continue
        for sink in sinks:
            targets = set(graph.callargs_by_call.get(sink.element.id, []))
            if not targets:
                continue
            path = shortest_path(graph, start_ids, targets, max_depth)
            if path is None:
                continue
            traces.append(FlowTrace(None, None, source,
                                    _steps_from_path(graph, path), sink))
    return traces
