"""Recursive-descent parser for a pragmatic Java subset.

Covers class/interface declarations, fields, methods, locals, assignments,
if/else, loops, try/catch/finally, calls, string concatenation, return,
throw, and comments. Constructs outside the subset (lambdas, inner classes,
switch, enums, ...) are recorded as opaque skipped regions with a warning
naming the line; the surrounding file keeps parsing.

After parsing, gaps between sibling nodes are filled with ``text`` leaves so
the leaves of the tree tile the file exactly: concatenating every leaf span
in document order reproduces the input byte for byte.
"""

from __future__ import annotations

from ..errors import FatalSyntax, UnreadableInput
from .lexer import MODIFIERS, PRIMITIVES, Token, tokenize, unescape_string
from .model import (
    ClassInfo,
    FieldDecl,
    MethodDecl,
    Node,
    ParamDecl,
    SourceUnit,
)

_BINARY_LEVELS = [
    ["||"],
    ["&&"],
    ["|"],
    ["^"],
    ["&"],
    ["==", "!="],
    ["<", ">", "<=", ">=", "instanceof"],
    ["<<", ">>", ">>>"],
    ["+", "-"],
    ["*", "/", "%"],
]

_UNARY_START = {"ident", "num", "str", "char"}


class _Skip(Exception):
    def __init__(self, reason: str, line: int):
        super().__init__(reason)
        self.reason = reason
        self.line = line


class _Parser:
    def __init__(self, text: str, path: str):
        self.text = text
        self.path = path
        self.toks, self.comments = tokenize(text)
        self.pos = 0
        self.warnings: list[tuple[int, str]] = []
        self.methods: list[MethodDecl] = []
        self.globals: list[FieldDecl] = []
        self.classes: list[ClassInfo] = []
        self.imports: list[str] = []
        self._method_seq = 0
        self._class_stack: list[str] = []

    # ------------------------------------------------------------------
    # token plumbing

    def peek(self, off: int = 0) -> Token:
        idx = min(self.pos + off, len(self.toks) - 1)
        return self.toks[idx]

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind in ("punct", "ident")

    def eof(self) -> bool:
        return self.peek().kind == "eof"

    def advance(self) -> Token:
        tok = self.toks[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        if not self.at(text):
            tok = self.peek()
            raise _Skip(f"expected {text!r}, found {tok.text!r}", tok.line)
        return self.advance()

    def _node(self, kind: str, start_idx: int, **attrs) -> Node:
        first = self.toks[start_idx]
        last = self.toks[max(start_idx, self.pos - 1)]
        return Node(kind, first.start, last.end, first.line,
                    last.line + last.text.count("\n"), attrs=attrs)

    def _close(self, node: Node, start_idx: int) -> Node:
        first = self.toks[start_idx]
        last = self.toks[max(start_idx, self.pos - 1)]
        node.start, node.end = first.start, last.end
        node.start_line, node.end_line = first.line, last.line + last.text.count("\n")
        return node

    # ------------------------------------------------------------------
    # skipping helpers

    def _warn(self, line: int, message: str) -> None:
        self.warnings.append((line, message))

    def _skip_annotations(self) -> None:
        while self.at("@"):
            self.advance()
            while self.peek().kind == "ident":
                self.advance()
                if self.at("."):
                    self.advance()
                    continue
                break
            if self.at("("):
                self._skip_balanced("(", ")")

    def _skip_balanced(self, open_t: str, close_t: str) -> None:
        depth = 0
        while not self.eof():
            tok = self.advance()
            if tok.text == open_t:
                depth += 1
            elif tok.text == close_t:
                depth -= 1
                if depth <= 0:
                    return

    def _skip_statement_tokens(self) -> None:
        """Advance past the current statement: to ';' at depth 0 or block edge."""
        depth = 0
        consumed = 0
        while not self.eof():
            tok = self.peek()
            if tok.text == ";" and depth == 0:
                self.advance()
                return
            if tok.text == "{":
                depth += 1
            elif tok.text == "}":
                if depth == 0:
                    if consumed == 0:
                        self.advance()
                    return
                depth -= 1
            self.advance()
            consumed += 1

    def _skipped_node(self, start_idx: int, reason: str, line: int) -> Node:
        if self.pos == start_idx and not self.eof():
            self.advance()
        self._warn(line, f"skipped unsupported construct: {reason}")
        return self._node("skipped", start_idx, reason=reason)

    # ------------------------------------------------------------------
    # types

    def _parse_type_opt(self) -> str | None:
        save = self.pos
        tok = self.peek()
        if tok.kind != "ident":
            return None
        if tok.text in PRIMITIVES:
            name = tok.text
            self.advance()
        elif tok.text[0].isalpha() or tok.text[0] in "_$":
            if tok.text in ("new", "return", "throw", "if", "while", "for", "this", "super",
                            "true", "false", "null", "instanceof", "do", "try", "else",
                            "break", "continue", "switch", "case", "default", "catch",
                            "finally", "throws", "class", "interface", "enum"):
                return None
            name = tok.text
            self.advance()
            while self.at(".") and self.peek(1).kind == "ident":
                self.advance()
                name = self.peek().text  # erasure keeps the last segment
                self.advance()
        else:
            return None
        if self.at("<"):
            if not self._skip_generics():
                self.pos = save
                return None
        dims = ""
        while self.at("[") and self.peek(1).text == "]":
            self.advance()
            self.advance()
            dims += "[]"
        return name + dims

    def _skip_generics(self) -> bool:
        """Consume a balanced <...> group; fail (rollback) on expression-like content."""
        save = self.pos
        depth = 0
        while not self.eof():
            tok = self.peek()
            if tok.text == "<":
                depth += 1
            elif tok.text == ">":
                depth -= 1
                self.advance()
                if depth == 0:
                    return True
                continue
            elif tok.text == ">>":
                depth -= 2
                self.advance()
                if depth <= 0:
                    return depth == 0
                continue
            elif tok.kind not in ("ident",) and tok.text not in (",", ".", "?", "[", "]", "<"):
                self.pos = save
                return False
            self.advance()
        self.pos = save
        return False

    # ------------------------------------------------------------------
    # compilation unit

    def parse_unit(self) -> SourceUnit:
        children: list[Node] = []
        while not self.eof():
            start_idx = self.pos
            tok = self.peek()
            if tok.text == ";":
                self.advance()
                continue
            self._skip_annotations()
            if self.pos != start_idx and self.eof():
                break
            tok = self.peek()
            if tok.is_kw("package"):
                while not self.eof() and not self.at(";"):
                    self.advance()
                if self.at(";"):
                    self.advance()
                children.append(self._node("package", start_idx))
                continue
            if tok.is_kw("import"):
                parts = []
                self.advance()
                while not self.eof() and not self.at(";"):
                    parts.append(self.advance().text)
                if self.at(";"):
                    self.advance()
                self.imports.append("".join(p for p in parts if p != "static"))
                children.append(self._node("import", start_idx))
                continue
            mods_end = self._peek_past_modifiers()
            head = self.toks[mods_end]
            if head.text in ("class", "interface"):
                children.append(self._parse_type_decl())
                continue
            if head.text == "enum":
                self._advance_to(mods_end + 1)
                self._skip_decl_region()
                children.append(self._skipped_node(start_idx, "enum declaration", head.line))
                continue
            line = tok.line
            self._skip_statement_tokens()
            children.append(self._skipped_node(start_idx, f"top-level {tok.text!r}", line))

        if not self.classes:
            raise FatalSyntax(f"{self.path}: no class or interface declaration found")

        root = Node("unit", 0, len(self.text), 1, self.text.count("\n") + 1, children=children)
        _attach_parents(root)
        _tile(root, self.text)
        return SourceUnit(
            path=self.path,
            text=self.text,
            lines=self.text.split("\n"),
            tree=root,
            methods=self.methods,
            globals=self.globals,
            comments=self.comments,
            classes=self.classes,
            imports=self.imports,
            warnings=self.warnings,
        )

    def _peek_past_modifiers(self) -> int:
        idx = self.pos
        while self.toks[idx].text in MODIFIERS:
            idx += 1
        return idx

    def _advance_to(self, idx: int) -> None:
        self.pos = idx

    def _skip_decl_region(self) -> None:
        """Consume to the end of a declaration: its balanced body or a ';'."""
        while not self.eof():
            tok = self.peek()
            if tok.text == "{":
                self._skip_balanced("{", "}")
                return
            if tok.text == ";":
                self.advance()
                return
            self.advance()

    # ------------------------------------------------------------------
    # type declarations

    def _parse_type_decl(self) -> Node:
        start_idx = self.pos
        while self.peek().text in MODIFIERS:
            self.advance()
        kw = self.advance().text  # class | interface
        name_tok = self.peek()
        name = name_tok.text if name_tok.kind == "ident" else "Anonymous"
        if name_tok.kind == "ident":
            self.advance()
        if self.at("<"):
            self._skip_generics()
        extends = None
        implements: list[str] = []
        while self.peek().text in ("extends", "implements"):
            which = self.advance().text
            names = [self._parse_type_opt() or "?"]
            while self.at(","):
                self.advance()
                names.append(self._parse_type_opt() or "?")
            if which == "extends":
                extends = names[0]
            else:
                implements = names
        node = Node("class" if kw == "class" else "interface", 0, 0, 0, 0,
                    attrs={"name": name, "extends": extends, "implements": implements})
        self._class_stack.append(name)
        self.expect("{")
        while not self.eof() and not self.at("}"):
            node.children.append(self._parse_member(name))
        if self.at("}"):
            self.advance()
        self._class_stack.pop()
        self._close(node, start_idx)
        self.classes.append(ClassInfo(name, extends, implements, kw == "interface",
                                      node.start, node.end))
        return node

    def _parse_member(self, class_name: str) -> Node:
        start_idx = self.pos
        try:
            if self.at(";"):
                self.advance()
                return self._node("empty", start_idx)
            self._skip_annotations()
            mods_end = self._peek_past_modifiers()
            head = self.toks[mods_end]
            if head.text in ("class", "interface", "enum"):
                self._advance_to(mods_end + 1)
                self._skip_decl_region()
                return self._skipped_node(start_idx, f"nested {head.text}", head.line)
            if head.text == "{":
                self._advance_to(mods_end)
                self._skip_balanced("{", "}")
                return self._skipped_node(start_idx, "initializer block", head.line)
            self._advance_to(mods_end)
            # constructor?
            if (self.peek().kind == "ident" and self.peek().text == class_name
                    and self.peek(1).text == "("):
                ctor_name = self.advance().text
                return self._parse_method_rest(start_idx, class_name, ctor_name, class_name)
            if self.at("<"):  # generic method type parameters
                self._skip_generics()
            type_name = self._parse_type_opt()
            if type_name is None:
                tok = self.peek()
                self._skip_statement_tokens()
                return self._skipped_node(start_idx, f"member starting with {tok.text!r}", tok.line)
            if self.peek().kind != "ident":
                tok = self.peek()
                self._skip_statement_tokens()
                return self._skipped_node(start_idx, "member without a name", tok.line)
            name = self.advance().text
            if self.at("("):
                return self._parse_method_rest(start_idx, class_name, name, type_name)
            return self._parse_field_rest(start_idx, class_name, type_name, name)
        except _Skip as skip:
            self._skip_statement_tokens()
            return self._skipped_node(start_idx, skip.reason, skip.line)

    def _parse_params(self) -> list[ParamDecl]:
        params: list[ParamDecl] = []
        self.expect("(")
        while not self.eof() and not self.at(")"):
            self._skip_annotations()
            if self.peek().text == "final":
                self.advance()
            p_start = self.peek()
            p_type = self._parse_type_opt()
            if p_type is None:
                raise _Skip("unparseable parameter list", p_start.line)
            if self.at("..."):
                self.advance()
                p_type += "[]"
            if self.peek().kind != "ident":
                raise _Skip("parameter without a name", self.peek().line)
            name_tok = self.advance()
            while self.at("[") and self.peek(1).text == "]":
                self.advance()
                self.advance()
                p_type += "[]"
            params.append(ParamDecl(p_type, name_tok.text, p_start.start,
                                    name_tok.end, name_tok.line))
            if self.at(","):
                self.advance()
        self.expect(")")
        return params

    def _parse_method_rest(self, start_idx: int, class_name: str,
                           name: str, return_type: str) -> Node:
        params = self._parse_params()
        if self.peek().text == "throws":
            self.advance()
            self._parse_type_opt()
            while self.at(","):
                self.advance()
                self._parse_type_opt()
        body = None
        if self.at("{"):
            body = self._parse_block()
        elif self.at(";"):
            self.advance()
        else:
            raise _Skip("method without body or ';'", self.peek().line)
        self._method_seq += 1
        method_id = f"{self.path}#m{self._method_seq}"
        param_nodes = [
            Node("param", p.start, p.end, p.line, p.line,
                 attrs={"name": p.name, "type": p.type_name})
            for p in params
        ]
        children = param_nodes + ([body] if body else [])
        node = Node("method", 0, 0, 0, 0, children=children,
                    attrs={"name": name, "return_type": return_type,
                           "class_name": class_name, "method_id": method_id})
        self._close(node, start_idx)
        self.methods.append(MethodDecl(method_id, name, class_name, params, body, node,
                                       node.start, node.end, node.start_line, node.end_line))
        return node

    def _parse_field_rest(self, start_idx: int, class_name: str,
                          type_name: str, first_name: str) -> Node:
        node = Node("field", 0, 0, 0, 0, attrs={"type": type_name})
        name = first_name
        name_tok_idx = self.pos - 1
        while True:
            decl_start = name_tok_idx
            d_type = type_name
            while self.at("[") and self.peek(1).text == "]":
                self.advance()
                self.advance()
                d_type += "[]"
            decl = Node("declarator", 0, 0, 0, 0, attrs={"name": name, "type": d_type})
            if self.at("="):
                self.advance()
                decl.children.append(self._parse_assignment())
            self._close(decl, decl_start)
            node.children.append(decl)
            self.globals.append(FieldDecl(name, d_type, class_name, decl.start, decl.end,
                                          decl.start_line, decl.end_line, decl))
            if self.at(","):
                self.advance()
                if self.peek().kind != "ident":
                    raise _Skip("field declarator without a name", self.peek().line)
                name_tok_idx = self.pos
                name = self.advance().text
                continue
            break
        self.expect(";")
        return self._close(node, start_idx)

    # ------------------------------------------------------------------
    # statements

    def _parse_block(self) -> Node:
        start_idx = self.pos
        node = Node("block", 0, 0, 0, 0)
        self.expect("{")
        while not self.eof() and not self.at("}"):
            node.children.append(self._parse_statement())
        if self.at("}"):
            self.advance()
        return self._close(node, start_idx)

    def _parse_statement(self) -> Node:
        start_idx = self.pos
        try:
            return self._parse_statement_inner(start_idx)
        except _Skip as skip:
            self._skip_statement_tokens()
            return self._skipped_node(start_idx, skip.reason, skip.line)

    def _parse_statement_inner(self, start_idx: int) -> Node:
        tok = self.peek()
        self._skip_annotations()
        tok = self.peek()
        text = tok.text

        if text == "{":
            return self._parse_block()
        if text == ";":
            self.advance()
            return self._node("empty", start_idx)
        if text == "if":
            return self._parse_if(start_idx)
        if text == "while":
            self.advance()
            self.expect("(")
            cond = self._parse_expression()
            self.expect(")")
            body = self._parse_statement()
            node = Node("while", 0, 0, 0, 0, children=[cond, body])
            return self._close(node, start_idx)
        if text == "do":
            self.advance()
            body = self._parse_statement()
            self.expect("while")
            self.expect("(")
            cond = self._parse_expression()
            self.expect(")")
            self.expect(";")
            node = Node("dowhile", 0, 0, 0, 0, children=[body, cond])
            return self._close(node, start_idx)
        if text == "for":
            return self._parse_for(start_idx)
        if text == "try":
            return self._parse_try(start_idx)
        if text == "return":
            self.advance()
            value = None
            if not self.at(";"):
                value = self._parse_expression()
            self.expect(";")
            node = Node("return", 0, 0, 0, 0, children=[value] if value else [])
            return self._close(node, start_idx)
        if text == "throw":
            self.advance()
            value = self._parse_expression()
            self.expect(";")
            node = Node("throw", 0, 0, 0, 0, children=[value])
            return self._close(node, start_idx)
        if text in ("break", "continue"):
            self.advance()
            if self.peek().kind == "ident" and not self.at(";"):
                self.advance()  # label
            self.expect(";")
            return self._node(text, start_idx)
        if text in ("switch", "synchronized"):
            line = tok.line
            self.advance()
            if self.at("("):
                self._skip_balanced("(", ")")
            if self.at("{"):
                self._skip_balanced("{", "}")
            elif not self.at(";"):
                self._skip_statement_tokens()
            return self._skipped_node(start_idx, f"{text} statement", line)
        if text in ("class", "interface", "enum") or (
                text in MODIFIERS and self.toks[self._peek_past_modifiers()].text
                in ("class", "interface", "enum")):
            line = tok.line
            self._advance_to(self._peek_past_modifiers() + 1)
            self._skip_decl_region()
            return self._skipped_node(start_idx, "local type declaration", line)

        decl = self._try_parse_localdecl(start_idx)
        if decl is not None:
            return decl
        expr = self._parse_expression()
        self.expect(";")
        node = Node("exprstmt", 0, 0, 0, 0, children=[expr])
        return self._close(node, start_idx)

    def _parse_if(self, start_idx: int) -> Node:
        self.expect("if")
        self.expect("(")
        cond = self._parse_expression()
        self.expect(")")
        then = self._parse_statement()
        children = [cond, then]
        has_else = False
        if self.peek().text == "else":
            self.advance()
            children.append(self._parse_statement())
            has_else = True
        node = Node("if", 0, 0, 0, 0, children=children, attrs={"has_else": has_else})
        return self._close(node, start_idx)

    def _parse_for(self, start_idx: int) -> Node:
        self.expect("for")
        self.expect("(")
        save = self.pos
        if self.peek().text == "final":
            self.advance()
        var_type = self._parse_type_opt()
        if var_type is not None and self.peek().kind == "ident" and self.peek(1).text == ":":
            var_tok = self.advance()
            self.advance()  # ':'
            iterable = self._parse_expression()
            self.expect(")")
            body = self._parse_statement()
            node = Node("foreach", 0, 0, 0, 0, children=[iterable, body],
                        attrs={"var": var_tok.text, "var_type": var_type,
                               "var_line": var_tok.line, "var_start": var_tok.start,
                               "var_end": var_tok.end})
            return self._close(node, start_idx)
        self.pos = save
        children: list[Node] = []
        if not self.at(";"):
            init = self._try_parse_localdecl(self.pos, expect_semi=False)
            if init is None:
                init = Node("exprstmt", 0, 0, 0, 0, children=[self._parse_expression()])
                self._close(init, save)
                while self.at(","):
                    self.advance()
                    self._parse_expression()
            children.append(init)
        self.expect(";")
        if not self.at(";"):
            children.append(self._parse_expression())
        self.expect(";")
        if not self.at(")"):
            children.append(self._parse_expression())
            while self.at(","):
                self.advance()
                children.append(self._parse_expression())
        self.expect(")")
        children.append(self._parse_statement())
        node = Node("for", 0, 0, 0, 0, children=children)
        return self._close(node, start_idx)

    def _parse_try(self, start_idx: int) -> Node:
        self.expect("try")
        children: list[Node] = []
        if self.at("("):
            self.advance()
            while not self.eof() and not self.at(")"):
                res_start = self.pos
                res = self._try_parse_localdecl(res_start, expect_semi=False)
                if res is None:
                    self._parse_expression()
                else:
                    children.append(res)
                if self.at(";"):
                    self.advance()
            self.expect(")")
        children.append(self._parse_block())
        while self.peek().text == "catch":
            c_start = self.pos
            self.advance()
            self.expect("(")
            if self.peek().text == "final":
                self.advance()
            types = [self._parse_type_opt() or "Exception"]
            while self.at("|"):
                self.advance()
                types.append(self._parse_type_opt() or "Exception")
            var_tok = self.advance() if self.peek().kind == "ident" else None
            self.expect(")")
            body = self._parse_block()
            catch = Node("catch", 0, 0, 0, 0, children=[body],
                         attrs={"types": types, "var": var_tok.text if var_tok else None,
                                "var_line": var_tok.line if var_tok else None,
                                "var_start": var_tok.start if var_tok else None,
                                "var_end": var_tok.end if var_tok else None})
            children.append(self._close(catch, c_start))
        if self.peek().text == "finally":
            f_start = self.pos
            self.advance()
            body = self._parse_block()
            fin = Node("finally", 0, 0, 0, 0, children=[body])
            children.append(self._close(fin, f_start))
        node = Node("try", 0, 0, 0, 0, children=children)
        return self._close(node, start_idx)

    def _try_parse_localdecl(self, start_idx: int, expect_semi: bool = True) -> Node | None:
        save = self.pos
        if self.peek().text == "final":
            self.advance()
        type_name = self._parse_type_opt()
        if type_name is None or self.peek().kind != "ident":
            self.pos = save
            return None
        follower = self.peek(1).text
        if follower not in ("=", ";", ",", ")") and not (
                follower == "[" and self.peek(2).text == "]"):
            self.pos = save
            return None
        if follower == ")" and not expect_semi:
            pass  # resource-style declaration handled by caller
        elif follower == ")" :
            self.pos = save
            return None
        node = Node("localdecl", 0, 0, 0, 0, attrs={"type": type_name})
        while True:
            if self.peek().kind != "ident":
                raise _Skip("declarator without a name", self.peek().line)
            name_idx = self.pos
            name = self.advance().text
            d_type = type_name
            while self.at("[") and self.peek(1).text == "]":
                self.advance()
                self.advance()
                d_type += "[]"
            decl = Node("declarator", 0, 0, 0, 0, attrs={"name": name, "type": d_type})
            if self.at("="):
                self.advance()
                decl.children.append(self._parse_assignment())
            self._close(decl, name_idx)
            node.children.append(decl)
            if self.at(","):
                self.advance()
                continue
            break
        if expect_semi:
            self.expect(";")
        return self._close(node, start_idx)

    # ------------------------------------------------------------------
    # expressions

    def _parse_expression(self) -> Node:
        return self._parse_assignment()

    def _parse_assignment(self) -> Node:
        start_idx = self.pos
        lhs = self._parse_ternary()
        op = self.peek().text
        if op in ("=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>="):
            self.advance()
            rhs = self._parse_assignment()
            node = Node("assignexpr", 0, 0, 0, 0, children=[lhs, rhs], attrs={"op": op})
            return self._close(node, start_idx)
        return lhs

    def _parse_ternary(self) -> Node:
        start_idx = self.pos
        cond = self._parse_binary(0)
        if self.at("?"):
            self.advance()
            then = self._parse_assignment()
            self.expect(":")
            other = self._parse_assignment()
            node = Node("ternary", 0, 0, 0, 0, children=[cond, then, other])
            return self._close(node, start_idx)
        return cond

    def _parse_binary(self, level: int) -> Node:
        if level >= len(_BINARY_LEVELS):
            return self._parse_unary()
        start_idx = self.pos
        left = self._parse_binary(level + 1)
        while self.peek().text in _BINARY_LEVELS[level]:
            op = self.advance().text
            if op == "instanceof":
                self._parse_type_opt()
                node = Node("binop", 0, 0, 0, 0, children=[left], attrs={"op": op})
                left = self._close(node, start_idx)
                continue
            right = self._parse_binary(level + 1)
            node = Node("binop", 0, 0, 0, 0, children=[left, right], attrs={"op": op})
            left = self._close(node, start_idx)
        return left

    def _parse_unary(self) -> Node:
        start_idx = self.pos
        tok = self.peek()
        if tok.text in ("!", "~", "+", "-", "++", "--"):
            self.advance()
            operand = self._parse_unary()
            node = Node("unop", 0, 0, 0, 0, children=[operand], attrs={"op": tok.text})
            return self._close(node, start_idx)
        if tok.text == "(":
            cast = self._try_parse_cast(start_idx)
            if cast is not None:
                return cast
        return self._parse_postfix()

    def _try_parse_cast(self, start_idx: int) -> Node | None:
        save = self.pos
        self.advance()  # '('
        type_name = self._parse_type_opt()
        if type_name is None or not self.at(")"):
            self.pos = save
            return None
        base = type_name.rstrip("[]")
        looks_like_type = base in PRIMITIVES or (base and base[0].isupper())
        nxt = self.peek(1)
        operand_follows = nxt.kind in _UNARY_START or nxt.text in ("(", "!", "~", "this", "new")
        if not (looks_like_type and operand_follows):
            self.pos = save
            return None
        self.advance()  # ')'
        operand = self._parse_unary()
        node = Node("cast", 0, 0, 0, 0, children=[operand], attrs={"type": type_name})
        return self._close(node, start_idx)

    def _parse_args(self) -> list[Node]:
        args: list[Node] = []
        self.expect("(")
        while not self.eof() and not self.at(")"):
            args.append(self._parse_assignment())
            if self.at(","):
                self.advance()
                continue
            break
        self.expect(")")
        return args

    def _parse_postfix(self) -> Node:
        start_idx = self.pos
        node = self._parse_primary()
        while True:
            tok = self.peek()
            if tok.text == "." and self.peek(1).kind == "ident":
                recv_end = self.pos
                self.advance()
                name_tok = self.advance()
                if self.at("("):
                    recv_text = self._slice_tokens(start_idx, recv_end).strip()
                    args = self._parse_args()
                    call = Node("call", 0, 0, 0, 0, children=[node] + args,
                                attrs={"name": name_tok.text,
                                       "qualified": f"{recv_text}.{name_tok.text}",
                                       "name_line": name_tok.line, "name_col": name_tok.col,
                                       "n_args": len(args)})
                    node = self._close(call, start_idx)
                else:
                    acc = Node("fieldaccess", 0, 0, 0, 0, children=[node],
                               attrs={"name": name_tok.text})
                    node = self._close(acc, start_idx)
                continue
            if tok.text == "[":
                self.advance()
                index = self._parse_expression()
                self.expect("]")
                idx_node = Node("index", 0, 0, 0, 0, children=[node, index])
                node = self._close(idx_node, start_idx)
                continue
            if tok.text in ("++", "--"):
                self.advance()
                unop = Node("unop", 0, 0, 0, 0, children=[node], attrs={"op": tok.text})
                node = self._close(unop, start_idx)
                continue
            if tok.text == "->":
                raise _Skip("lambda expression", tok.line)
            if tok.text == "::":
                raise _Skip("method reference", tok.line)
            return node

    def _slice_tokens(self, start_idx: int, end_idx: int) -> str:
        if end_idx <= start_idx:
            return ""
        return self.text[self.toks[start_idx].start:self.toks[end_idx - 1].end]

    def _lambda_ahead(self) -> bool:
        """From a '(': does '->' follow the matching ')'?"""
        depth = 0
        idx = self.pos
        while idx < len(self.toks):
            text = self.toks[idx].text
            if text == "(":
                depth += 1
            elif text == ")":
                depth -= 1
                if depth == 0:
                    return idx + 1 < len(self.toks) and self.toks[idx + 1].text == "->"
            elif text in (";", "{", "}"):
                return False
            idx += 1
        return False

    def _parse_primary(self) -> Node:
        start_idx = self.pos
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            return self._node("literal-num", start_idx, value=tok.text)
        if tok.kind == "str":
            self.advance()
            return self._node("literal-str", start_idx,
                              value=unescape_string(tok.text), raw=tok.text)
        if tok.kind == "char":
            self.advance()
            return self._node("literal-char", start_idx, value=tok.text)
        if tok.text in ("true", "false"):
            self.advance()
            return self._node("literal-bool", start_idx, value=tok.text)
        if tok.text == "null":
            self.advance()
            return self._node("literal-null", start_idx)
        if tok.text in ("this", "super"):
            self.advance()
            if self.at("("):  # constructor delegation
                args = self._parse_args()
                node = Node("call", 0, 0, 0, 0, children=args,
                            attrs={"name": tok.text, "qualified": tok.text,
                                   "name_line": tok.line, "name_col": tok.col,
                                   "n_args": len(args)})
                return self._close(node, start_idx)
            return self._node(tok.text, start_idx)
        if tok.text == "new":
            return self._parse_new(start_idx)
        if tok.text == "(":
            if self._lambda_ahead():
                raise _Skip("lambda expression", tok.line)
            self.advance()
            inner = self._parse_expression()
            self.expect(")")
            node = Node("paren", 0, 0, 0, 0, children=[inner])
            return self._close(node, start_idx)
        if tok.text == "{":
            self.advance()
            node = Node("arrayinit", 0, 0, 0, 0)
            while not self.eof() and not self.at("}"):
                node.children.append(self._parse_assignment())
                if self.at(","):
                    self.advance()
            self.expect("}")
            return self._close(node, start_idx)
        if tok.kind == "ident":
            self.advance()
            if self.at("("):
                args = self._parse_args()
                node = Node("call", 0, 0, 0, 0, children=args,
                            attrs={"name": tok.text, "qualified": tok.text,
                                   "name_line": tok.line, "name_col": tok.col,
                                   "n_args": len(args)})
                return self._close(node, start_idx)
            return self._node("name", start_idx, name=tok.text)
        raise _Skip(f"unexpected token {tok.text!r}", tok.line)

    def _parse_new(self, start_idx: int) -> Node:
        new_tok = self.advance()
        type_name = self._parse_type_opt()
        if type_name is None:
            raise _Skip("object creation without a type", new_tok.line)
        base = type_name.rstrip("[]")
        if self.at("["):
            while self.at("["):
                self.advance()
                if not self.at("]"):
                    self._parse_expression()
                self.expect("]")
            init_children: list[Node] = []
            if self.at("{"):
                init_children.append(self._parse_primary())  # arrayinit
            node = Node("newarray", 0, 0, 0, 0, children=init_children,
                        attrs={"type": base})
            return self._close(node, start_idx)
        args = self._parse_args() if self.at("(") else []
        anonymous = False
        if self.at("{"):
            line = self.peek().line
            self._skip_balanced("{", "}")
            self._warn(line, "skipped unsupported construct: anonymous class body")
            anonymous = True
        node = Node("new", 0, 0, 0, 0, children=args,
                    attrs={"type": base, "qualified": f"new {base}", "name": base,
                           "name_line": new_tok.line, "name_col": new_tok.col,
                           "n_args": len(args), "anonymous": anonymous})
        return self._close(node, start_idx)


def _attach_parents(root: Node) -> None:
    stack = [root]
    while stack:
        node = stack.pop()
        for child in node.children:
            child.parent = node
            stack.append(child)


def _tile(node: Node, text: str) -> None:
    """Insert filler leaves so children tile the parent span exactly."""
    if not node.children:
        return
    filled: list[Node] = []
    cursor = node.start
    cursor_line = node.start_line
    for child in sorted(node.children, key=lambda c: c.start):
        if child.start > cursor:
            gap = Node("text", cursor, child.start, cursor_line, child.start_line,
                       parent=node)
            filled.append(gap)
        _tile(child, text)
        filled.append(child)
        cursor = max(cursor, child.end)
        cursor_line = max(cursor_line, child.end_line)
    if cursor < node.end:
        filled.append(Node("text", cursor, node.end, cursor_line, node.end_line,
                           parent=node))
    node.children = filled


def parse_source(text: str | bytes, path: str = "<memory>") -> SourceUnit:
    """Parse Java source text into a SourceUnit.

    Raises UnreadableInput for non-UTF-8 bytes and FatalSyntax when no class
    or interface declaration can be recovered. Unsupported constructs inside
    an otherwise parseable file become skipped regions plus warnings.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise UnreadableInput(f"{path}: not valid UTF-8 ({exc})") from None
    return _Parser(text, path).parse_unit()
