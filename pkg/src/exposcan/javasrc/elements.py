"""Extraction of the four element kinds and their hybrid contexts."""

from __future__ import annotations

import re

from ..errors import CommentHasNoContext
from .model import CodeElement, ContextSnippet, ElementKind, Node, SourceUnit


def _identifier_mentions(name: str, line: str) -> bool:
    """Identifier-boundary match so 'id' never matches 'valid'."""
    pattern = r"(?<![A-Za-z0-9_$])" + re.escape(name) + r"(?![A-Za-z0-9_$])"
    return re.search(pattern, line) is not None


def _col_of(unit: SourceUnit, offset: int, line: int) -> int:
    line_start = offset - len(unit.text[:offset].rsplit("\n", 1)[-1])
    return offset - line_start + 1


def _enclosing_method_id(unit: SourceUnit, start: int, end: int) -> str | None:
    for method in unit.methods:
        if method.start <= start and end <= method.end:
            return method.method_id
    return None


def extract_elements(unit: SourceUnit) -> list[CodeElement]:
    """Pull every variable, string literal, comment, and call site out of a unit.

    Order is deterministic: (file, line, column); ids are assigned after
    sorting so two runs over the same file agree bit for bit.
    """
    raw: list[CodeElement] = []

    def add(kind: ElementKind, name: str, declared_type: str | None,
            start: int, end: int, start_line: int, end_line: int,
            qualified: str | None = None, node: Node | None = None) -> None:
        name = name.strip()
        if not name:
            return
        raw.append(CodeElement(
            id="",
            kind=kind,
            name=name,
            declared_type=declared_type,
            file=unit.path,
            start_line=start_line,
            end_line=end_line,
            col=_col_of(unit, start, start_line),
            enclosing_method=_enclosing_method_id(unit, start, end),
            qualified_name=qualified,
            node=node,
        ))

    for node in unit.tree.walk():
        kind = node.kind
        if kind == "declarator":
            parent_kind = node.parent.kind if node.parent else ""
            if parent_kind in ("field", "localdecl"):
                add(ElementKind.VARIABLE, node.attrs["name"], node.attrs["type"],
                    node.start, node.end, node.start_line, node.end_line, node=node)
        elif kind == "param":
            add(ElementKind.VARIABLE, node.attrs["name"], node.attrs["type"],
                node.start, node.end, node.start_line, node.end_line, node=node)
        elif kind == "foreach":
            add(ElementKind.VARIABLE, node.attrs["var"], node.attrs["var_type"],
                node.attrs["var_start"], node.attrs["var_end"],
                node.attrs["var_line"], node.attrs["var_line"], node=node)
        elif kind == "catch" and node.attrs.get("var"):
            add(ElementKind.VARIABLE, node.attrs["var"], node.attrs["types"][0],
                node.attrs["var_start"], node.attrs["var_end"],
                node.attrs["var_line"], node.attrs["var_line"], node=node)
        elif kind == "literal-str":
            add(ElementKind.STRING_LITERAL, node.attrs["value"], None,
                node.start, node.end, node.start_line, node.end_line, node=node)
        elif kind in ("call", "new"):
            name_line = node.attrs.get("name_line", node.start_line)
            name_col = node.attrs.get("name_col")
            element = CodeElement(
                id="",
                kind=ElementKind.API_CALL,
                name=node.attrs["name"],
                declared_type=None,
                file=unit.path,
                start_line=name_line,
                end_line=node.end_line,
                col=name_col if name_col is not None
                else _col_of(unit, node.start, name_line),
                enclosing_method=_enclosing_method_id(unit, node.start, node.end),
                qualified_name=node.attrs.get("qualified"),
                node=node,
            )
            if element.name.strip():
                raw.append(element)

    for comment in unit.comments:
        text = comment.text.strip()
        if not text:
            continue
        raw.append(CodeElement(
            id="",
            kind=ElementKind.COMMENT,
            name=text,
            declared_type=None,
            file=unit.path,
            start_line=comment.start_line,
            end_line=comment.end_line,
            col=_col_of(unit, comment.start, comment.start_line),
            enclosing_method=_enclosing_method_id(unit, comment.start, comment.end),
            node=None,
        ))

    raw.sort(key=lambda e: (e.file, e.start_line, e.col, e.kind.value, e.name))
    for idx, element in enumerate(raw):
        element.id = f"{unit.path}#e{idx:04d}"
    return raw


def extract_context(element: CodeElement, unit: SourceUnit) -> ContextSnippet:
    """Build the method/line hybrid context for a non-comment element."""
    if element.kind == ElementKind.COMMENT:
        raise CommentHasNoContext(element.id)

    method_text = ""
    if element.enclosing_method is not None:
        method = unit.method_by_id(element.enclosing_method)
        method_text = unit.slice(method.start, method.end)

    global_lines: list[str] = []
    seen: set[int] = set()
    for decl in unit.globals:
        for line_no in range(decl.start_line, decl.end_line + 1):
            if line_no in seen or line_no > len(unit.lines):
                continue
            line = unit.line_text(line_no)
            if _identifier_mentions(element.name, line):
                global_lines.append(line)
                seen.add(line_no)

    if element.kind == ElementKind.VARIABLE:
        type_tag = element.declared_type or ""
    elif element.kind == ElementKind.API_CALL:
        type_tag = element.qualified_name or element.name
    else:
        type_tag = ""
    return ContextSnippet(element.id, method_text, global_lines, type_tag)
