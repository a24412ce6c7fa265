"""Java-subset frontend: parsing, element extraction, hybrid contexts."""

from .elements import extract_context, extract_elements
from .model import (
    ClassInfo,
    CodeElement,
    CommentInfo,
    ContextSnippet,
    ElementKind,
    FieldDecl,
    MethodDecl,
    Node,
    ParamDecl,
    SourceUnit,
)
from .parser import parse_source

__all__ = [
    "ClassInfo",
    "CodeElement",
    "CommentInfo",
    "ContextSnippet",
    "ElementKind",
    "FieldDecl",
    "MethodDecl",
    "Node",
    "ParamDecl",
    "SourceUnit",
    "extract_context",
    "extract_elements",
    "parse_source",
]
