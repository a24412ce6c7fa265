"""Data model for parsed Java sources: syntax nodes, units, and code elements."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Optional


@dataclass
class Node:
    """A syntax-tree node covering a contiguous source span.

    Children tile the parent span exactly once the unit is finalized:
    gaps between siblings are filled with ``text`` leaves so that
    concatenating all leaves in document order reproduces the file.
    """

    kind: str
    start: int
    end: int
    start_line: int
    end_line: int
    children: list["Node"] = field(default_factory=list)
    attrs: dict = field(default_factory=dict)
    parent: Optional["Node"] = field(default=None, repr=False, compare=False)

    def walk(self) -> Iterator["Node"]:
        yield self
        for child in self.children:
            yield from child.walk()

    def leaves(self) -> Iterator["Node"]:
        if not self.children:
            yield self
            return
        for child in self.children:
            yield from child.leaves()

    def ancestors(self) -> Iterator["Node"]:
        node = self.parent
        while node is not None:
            yield node
            node = node.parent


@dataclass
class ParamDecl:
    type_name: str
    name: str
    start: int
    end: int
    line: int


@dataclass
class MethodDecl:
    method_id: str
    name: str
    class_name: str
    params: list[ParamDecl]
    body: Optional[Node]
    node: Node
    start: int
    end: int
    start_line: int
    end_line: int

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass
class FieldDecl:
    name: str
    type_name: str
    class_name: str
    start: int
    end: int
    start_line: int
    end_line: int
    node: Node


@dataclass
class CommentInfo:
    text: str
    raw: str
    start: int
    end: int
    start_line: int
    end_line: int
    block: bool


@dataclass
class ClassInfo:
    name: str
    extends: Optional[str]
    implements: list[str]
    is_interface: bool
    start: int
    end: int


@dataclass
class SourceUnit:
    """A parsed Java file in the supported subset."""

    path: str
    text: str
    lines: list[str]
    tree: Node
    methods: list[MethodDecl]
    globals: list[FieldDecl]
    comments: list[CommentInfo]
    classes: list[ClassInfo]
    imports: list[str]
    warnings: list[tuple[int, str]]

    def line_text(self, line: int) -> str:
        """1-based raw line lookup."""
        return self.lines[line - 1]

    def slice(self, start: int, end: int) -> str:
        return self.text[start:end]

    def method_by_id(self, method_id: str) -> MethodDecl:
        for method in self.methods:
            if method.method_id == method_id:
                return method
        raise KeyError(method_id)

    @property
    def is_servlet_context(self) -> bool:
        if any(imp.startswith(("javax.servlet", "jakarta.servlet")) for imp in self.imports):
            return True
        for cls in self.classes:
            sup = cls.extends or ""
            if sup.endswith(("HttpServlet", "GenericServlet")) or cls.name.endswith("Servlet"):
                return True
        return False


class ElementKind(enum.Enum):
    VARIABLE = "Variable"
    STRING_LITERAL = "StringLiteral"
    COMMENT = "Comment"
    API_CALL = "ApiCall"


@dataclass
class CodeElement:
    """A variable, string literal, comment, or call site pulled out of a unit."""

    id: str
    kind: ElementKind
    name: str
    declared_type: Optional[str]
    file: str
    start_line: int
    end_line: int
    col: int
    enclosing_method: Optional[str]
    qualified_name: Optional[str] = None
    node: Optional[Node] = field(default=None, repr=False, compare=False)

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "name": self.name,
            "type": self.declared_type,
            "file": self.file,
            "startLine": self.start_line,
            "endLine": self.end_line,
        }


@dataclass
class ContextSnippet:
    """Hybrid context for an element: enclosing method, global lines, type tag."""

    element_id: str
    method_text: str
    global_lines: list[str]
    type_tag: str

    def as_text(self) -> str:
        parts = [self.method_text] + self.global_lines + [self.type_tag]
        return "\n".join(p for p in parts if p)
