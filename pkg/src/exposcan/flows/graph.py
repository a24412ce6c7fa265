"""Taint-flow graph over parsed units.

Propagation is deliberately lightweight: context-insensitive, flow-
insensitive within a method, field-based, and collections taint wholesale.
Calls resolve by name and arity against the analyzed corpus only; an
unresolvable call simply contributes no interprocedural edges. Precision is
recovered downstream by the verification stage.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from ..embeddings import subtokenize
from ..javasrc.model import CodeElement, MethodDecl, Node, SourceUnit


class EdgeKind(enum.Enum):
    ASSIGN = "Assign"
    CONCAT = "Concat"
    ARG_TO_PARAM = "ArgToParam"
    RETURN_TO_CALLER = "ReturnToCaller"
    FIELD_STORE = "FieldStore"
    FIELD_LOAD = "FieldLoad"
    COLLECTION_INSERT = "CollectionInsert"
    COLLECTION_READ = "CollectionRead"


@dataclass(frozen=True)
class GuardInfo:
    catch_types: tuple[str, ...] = ()
    debug_guarded: bool = False
    servlet_context: bool = False
    server_error_path: bool = False


@dataclass
class FlowNode:
    id: str
    kind: str  # var | field | literal | expr | callarg | callret | return
    file: str
    line: int
    end_line: int
    label: str
    data_type: str = "unknown"
    element_id: str | None = None
    call_element_id: str | None = None
    guards: GuardInfo = field(default_factory=GuardInfo)


@dataclass(frozen=True)
class FlowEdge:
    src: str
    dst: str
    kind: EdgeKind


class FlowGraph:
    """Nodes plus directed taint edges with adjacency indexes."""

    def __init__(self) -> None:
        self.nodes: dict[str, FlowNode] = {}
        self.edges: list[FlowEdge] = []
        self._edge_set: set[tuple[str, str, EdgeKind]] = set()
        self.out: dict[str, list[tuple[str, EdgeKind]]] = {}
        self.nodes_by_element: dict[str, list[str]] = {}
        self.callargs_by_call: dict[str, list[str]] = {}

    def add_node(self, node: FlowNode) -> FlowNode:
        existing = self.nodes.get(node.id)
        if existing is not None:
            return existing
        self.nodes[node.id] = node
        self.out.setdefault(node.id, [])
        if node.element_id:
            self.nodes_by_element.setdefault(node.element_id, []).append(node.id)
        if node.kind == "callarg" and node.call_element_id:
            self.callargs_by_call.setdefault(node.call_element_id, []).append(node.id)
        return node

    def add_edge(self, src: str, dst: str, kind: EdgeKind) -> None:
        if src not in self.nodes or dst not in self.nodes:
            raise KeyError(f"edge endpoints must exist: {src} -> {dst}")
        key = (src, dst, kind)
        if key in self._edge_set:
            return
        self._edge_set.add(key)
        self.edges.append(FlowEdge(src, dst, kind))
        self.out[src].append((dst, kind))

    def successors(self, node_id: str) -> list[tuple[str, EdgeKind]]:
        return self.out.get(node_id, [])

    def has_edge(self, src: str, dst: str) -> bool:
        return any(key[0] == src and key[1] == dst for key in self._edge_set)


_COLLECTION_INSERT_METHODS = frozenset(
    {"add", "addall", "put", "putall", "set", "push", "offer", "insert",
     "append", "addfirst", "addlast"})
_COLLECTION_READ_METHODS = frozenset(
    {"get", "remove", "poll", "peek", "pop", "next", "iterator", "values",
     "keyset", "entryset", "toarray", "stream", "elementat", "getfirst",
     "getlast", "tostring"})

_DEBUG_TOKENS = ("debug", "verbose")


def _condition_is_debug_guard(cond: Node) -> bool:
    for node in cond.walk():
        if node.kind == "name":
            tokens = set(subtokenize(node.attrs["name"]))
            if tokens & set(_DEBUG_TOKENS):
                return True
        elif node.kind == "fieldaccess":
            tokens = set(subtokenize(node.attrs["name"]))
            if tokens & set(_DEBUG_TOKENS):
                return True
        elif node.kind == "call":
            tokens = set(subtokenize(node.attrs["name"]))
            if tokens & set(_DEBUG_TOKENS):
                return True
            if {"trace", "enabled"} <= tokens:
                return True
    return False


def _status_is_server_error(call: Node) -> bool:
    args = _call_args(call)
    if not args:
        return False
    first = args[0]
    if first.kind == "literal-num":
        try:
            return int(first.attrs["value"].rstrip("lL")) >= 500
        except ValueError:
            return False
    return False


def _call_args(call: Node) -> list[Node]:
    n_args = call.attrs.get("n_args", 0)
    if n_args == 0:
        return []
    real = [c for c in call.children if c.kind != "text"]
    return real[-n_args:]


def _call_receiver(call: Node) -> Node | None:
    n_args = call.attrs.get("n_args", 0)
    real = [c for c in call.children if c.kind != "text"]
    if call.kind == "call" and len(real) > n_args:
        return real[0]
    return None


def _method_on_server_error_path(method: MethodDecl, servlet: bool) -> bool:
    if method.body is None:
        return False
    if servlet and "error" in subtokenize(method.name):
        return True
    for node in method.body.walk():
        if node.kind == "call" and node.attrs["name"] in ("sendError", "setStatus"):
            if _status_is_server_error(node):
                return True
    return False


@dataclass
class _Scope:
    unit: SourceUnit
    method: MethodDecl | None
    locals: dict[str, str] = field(default_factory=dict)
    catch_types: tuple[str, ...] = ()
    debug: bool = False
    server_error: bool = False


class _GraphBuilder:
    def __init__(self, units: list[SourceUnit],
                 elements_by_unit: dict[str, list[CodeElement]]):
        self.units = units
        self.graph = FlowGraph()
        self.methods_by_sig: dict[tuple[str, int], list[tuple[SourceUnit, MethodDecl]]] = {}
        self.fields_by_class: dict[tuple[str, str], tuple[SourceUnit, str]] = {}
        self.element_by_node: dict[int, CodeElement] = {}
        self.elements_by_unit = elements_by_unit
        for unit in units:
            for method in unit.methods:
                self.methods_by_sig.setdefault((method.name, method.arity), []).append(
                    (unit, method))
            for decl in unit.globals:
                self.fields_by_class[(decl.class_name, decl.name)] = (unit, decl.type_name)
            for element in elements_by_unit.get(unit.path, []):
                if element.node is not None:
                    self.element_by_node[id(element.node)] = element

    # ------------------------------------------------------------------
    # node factories

    def _guards(self, scope: _Scope) -> GuardInfo:
        return GuardInfo(
            catch_types=scope.catch_types,
            debug_guarded=scope.debug,
            servlet_context=scope.unit.is_servlet_context,
            server_error_path=scope.server_error,
        )

    def _var_node(self, scope: _Scope, name: str, decl_node: Node | None = None,
                  data_type: str = "unknown") -> str:
        owner = scope.method.method_id if scope.method else f"{scope.unit.path}#class"
        node_id = f"var:{owner}#{name}"
        if node_id not in self.graph.nodes:
            element = self.element_by_node.get(id(decl_node)) if decl_node is not None else None
            line = decl_node.start_line if decl_node is not None else (
                scope.method.start_line if scope.method else 1)
            end_line = decl_node.end_line if decl_node is not None else line
            self.graph.add_node(FlowNode(
                node_id, "var", scope.unit.path, line, end_line, name,
                data_type=data_type,
                element_id=element.id if element else None,
                guards=self._guards(scope)))
        scope.locals[name] = node_id
        return node_id

    def _field_node(self, unit: SourceUnit, class_name: str, name: str) -> str:
        node_id = f"field:{class_name}.{name}"
        if node_id not in self.graph.nodes:
            info = self.fields_by_class.get((class_name, name))
            data_type = info[1] if info else "unknown"
            decl = next((d for d in unit.globals
                         if d.class_name == class_name and d.name == name), None)
            element = None
            if decl is not None:
                element = self.element_by_node.get(id(decl.node))
            line = decl.start_line if decl else 1
            self.graph.add_node(FlowNode(
                node_id, "field", unit.path, line, decl.end_line if decl else line,
                f"{class_name}.{name}", data_type=data_type,
                element_id=element.id if element else None,
                guards=GuardInfo(servlet_context=unit.is_servlet_context)))
        return node_id

    def _occurrence_node(self, scope: _Scope, kind: str, syntax: Node, label: str,
                         data_type: str = "unknown", suffix: str = "",
                         call_element_id: str | None = None,
                         element_id: str | None = None) -> str:
        node_id = f"{kind}:{scope.unit.path}:{syntax.start}-{syntax.end}{suffix}"
        if node_id not in self.graph.nodes:
            self.graph.add_node(FlowNode(
                node_id, kind, scope.unit.path, syntax.start_line, syntax.end_line,
                label, data_type=data_type, element_id=element_id,
                call_element_id=call_element_id, guards=self._guards(scope)))
        return node_id

    def _return_node(self, unit: SourceUnit, method: MethodDecl) -> str:
        node_id = f"return:{method.method_id}"
        if node_id not in self.graph.nodes:
            self.graph.add_node(FlowNode(
                node_id, "return", unit.path, method.end_line, method.end_line,
                f"return of {method.name}", guards=GuardInfo(
                    servlet_context=unit.is_servlet_context)))
        return node_id

    # ------------------------------------------------------------------
    # build

    def build(self) -> FlowGraph:
        # Return nodes first so call sites can link to methods defined later.
        for unit in self.units:
            for method in unit.methods:
                if method.body is not None:
                    self._return_node(unit, method)
        for unit in self.units:
            class_scope = _Scope(unit, None)
            for decl in unit.globals:
                field_id = self._field_node(unit, decl.class_name, decl.name)
                inits = [c for c in decl.node.children if c.kind != "text"]
                for init in inits:
                    for out in self._walk_expr(init, class_scope):
                        self.graph.add_edge(out, field_id, EdgeKind.FIELD_STORE)
            for method in unit.methods:
                self._walk_method(unit, method)
        return self.graph

    def _walk_method(self, unit: SourceUnit, method: MethodDecl) -> None:
        if method.body is None:
            return
        scope = _Scope(unit, method)
        scope.server_error = _method_on_server_error_path(
            method, unit.is_servlet_context)
        method_node_children = [c for c in method.node.children if c.kind == "param"]
        for param, param_node in zip(method.params, method_node_children):
            self._var_node(scope, param.name, param_node, param.type_name)
        self._walk_stmt(method.body, scope)

    # ------------------------------------------------------------------
    # statements

    def _walk_stmt(self, node: Node, scope: _Scope) -> None:
        kind = node.kind
        if kind in ("block", "unit", "exprstmt", "paren"):
            for child in node.children:
                if child.kind != "text":
                    self._walk_any(child, scope)
            return
        if kind == "localdecl":
            for decl in node.children:
                if decl.kind != "declarator":
                    continue
                var_id = self._var_node(scope, decl.attrs["name"], decl,
                                        decl.attrs["type"])
                for init in (c for c in decl.children if c.kind != "text"):
                    for out in self._walk_expr(init, scope):
                        self.graph.add_edge(out, var_id, EdgeKind.ASSIGN)
            return
        if kind == "if":
            real = [c for c in node.children if c.kind != "text"]
            cond, branches = real[0], real[1:]
            self._walk_expr(cond, scope)
            branch_scope = scope
            if _condition_is_debug_guard(cond):
                branch_scope = _Scope(scope.unit, scope.method, scope.locals,
                                      scope.catch_types, True, scope.server_error)
            for branch in branches:
                self._walk_any(branch, branch_scope)
            return
        if kind in ("while", "dowhile"):
            for child in (c for c in node.children if c.kind != "text"):
                self._walk_any(child, scope)
            return
        if kind == "for":
            for child in (c for c in node.children if c.kind != "text"):
                self._walk_any(child, scope)
            return
        if kind == "foreach":
            real = [c for c in node.children if c.kind != "text"]
            iterable, body = real[0], real[1]
            var_id = self._var_node(scope, node.attrs["var"], node,
                                    node.attrs["var_type"])
            for out in self._walk_expr(iterable, scope):
                self.graph.add_edge(out, var_id, EdgeKind.COLLECTION_READ)
            self._walk_any(body, scope)
            return
        if kind == "try":
            for child in (c for c in node.children if c.kind != "text"):
                self._walk_any(child, scope)
            return
        if kind == "catch":
            caught = tuple(node.attrs.get("types", ()))
            catch_scope = _Scope(scope.unit, scope.method, scope.locals,
                                 scope.catch_types + caught, scope.debug,
                                 scope.server_error)
            if node.attrs.get("var"):
                self._var_node(catch_scope, node.attrs["var"], node, caught[0])
            for child in (c for c in node.children if c.kind != "text"):
                self._walk_any(child, catch_scope)
            return
        if kind == "finally":
            for child in (c for c in node.children if c.kind != "text"):
                self._walk_any(child, scope)
            return
        if kind == "return":
            outs: list[str] = []
            for child in (c for c in node.children if c.kind != "text"):
                outs.extend(self._walk_expr(child, scope))
            if scope.method is not None and outs:
                ret = self._return_node(scope.unit, scope.method)
                for out in outs:
                    self.graph.add_edge(out, ret, EdgeKind.ASSIGN)
            return
        if kind == "throw":
            for child in (c for c in node.children if c.kind != "text"):
                self._walk_expr(child, scope)
            return
        if kind in ("empty", "break", "continue", "skipped", "text", "param",
                    "package", "import", "comment"):
            return
        # expressions in statement position and anything else with children
        self._walk_expr(node, scope)

    def _walk_any(self, node: Node, scope: _Scope) -> None:
        if node.kind in ("assignexpr", "call", "new", "binop", "unop", "ternary",
                         "cast", "fieldaccess", "index", "name", "paren",
                         "literal-str"):
            self._walk_expr(node, scope)
        else:
            self._walk_stmt(node, scope)

    # ------------------------------------------------------------------
    # expressions: returns the node ids carrying the expression's value

    def _walk_expr(self, node: Node, scope: _Scope) -> list[str]:
        kind = node.kind
        if kind == "name":
            resolved = self._resolve_name(node.attrs["name"], scope)
            return [resolved] if resolved else []
        if kind == "literal-str":
            element = self.element_by_node.get(id(node))
            lit = self._occurrence_node(scope, "literal", node,
                                        node.attrs["value"][:40], "String",
                                        element_id=element.id if element else None)
            return [lit]
        if kind in ("literal-num", "literal-char", "literal-bool", "literal-null"):
            return []
        if kind == "paren":
            outs: list[str] = []
            for child in (c for c in node.children if c.kind != "text"):
                outs.extend(self._walk_expr(child, scope))
            return outs
        if kind == "cast":
            outs = []
            for child in (c for c in node.children if c.kind != "text"):
                outs.extend(self._walk_expr(child, scope))
            return outs
        if kind == "unop":
            outs = []
            for child in (c for c in node.children if c.kind != "text"):
                outs.extend(self._walk_expr(child, scope))
            return outs
        if kind == "binop":
            real = [c for c in node.children if c.kind != "text"]
            operand_outs = [self._walk_expr(child, scope) for child in real]
            if node.attrs["op"] != "+":
                return []
            expr_id = self._occurrence_node(scope, "expr", node, "concat", "String")
            for outs in operand_outs:
                for out in outs:
                    self.graph.add_edge(out, expr_id, EdgeKind.CONCAT)
            return [expr_id]
        if kind == "ternary":
            real = [c for c in node.children if c.kind != "text"]
            self._walk_expr(real[0], scope)
            outs = []
            for branch in real[1:]:
                outs.extend(self._walk_expr(branch, scope))
            return outs
        if kind == "assignexpr":
            real = [c for c in node.children if c.kind != "text"]
            lhs, rhs = real[0], real[1]
            rhs_outs = self._walk_expr(rhs, scope)
            targets = self._lvalue_targets(lhs, scope)
            for target, edge_kind in targets:
                for out in rhs_outs:
                    self.graph.add_edge(out, target, edge_kind)
            return [t for t, _ in targets]
        if kind == "fieldaccess":
            resolved = self._resolve_field_access(node, scope)
            return [resolved] if resolved else []
        if kind == "index":
            real = [c for c in node.children if c.kind != "text"]
            base_outs = self._walk_expr(real[0], scope)
            if len(real) > 1:
                self._walk_expr(real[1], scope)
            outs = []
            for base in base_outs:
                read = self._occurrence_node(scope, "expr", node, "element read")
                self.graph.add_edge(base, read, EdgeKind.COLLECTION_READ)
                outs.append(read)
            return outs
        if kind == "arrayinit":
            expr_id = self._occurrence_node(scope, "expr", node, "array init")
            for child in (c for c in node.children if c.kind != "text"):
                for out in self._walk_expr(child, scope):
                    self.graph.add_edge(out, expr_id, EdgeKind.COLLECTION_INSERT)
            return [expr_id]
        if kind in ("call", "new"):
            return self._walk_call(node, scope)
        if kind == "newarray":
            expr_id = self._occurrence_node(scope, "expr", node, "new array")
            for child in (c for c in node.children if c.kind != "text"):
                for out in self._walk_expr(child, scope):
                    self.graph.add_edge(out, expr_id, EdgeKind.COLLECTION_INSERT)
            return [expr_id]
        if kind in ("this", "super"):
            return []
        # statements nested in expression position (defensive)
        for child in (c for c in node.children if c.kind != "text"):
            self._walk_any(child, scope)
        return []

    def _resolve_name(self, name: str, scope: _Scope) -> str | None:
        if name in scope.locals:
            return scope.locals[name]
        class_name = scope.method.class_name if scope.method else None
        if class_name and (class_name, name) in self.fields_by_class:
            return self._field_node(scope.unit, class_name, name)
        for (cls, fname) in self.fields_by_class:
            if fname == name and any(c.name == cls for c in scope.unit.classes):
                return self._field_node(scope.unit, cls, name)
        return None

    def _resolve_field_access(self, node: Node, scope: _Scope) -> str | None:
        real = [c for c in node.children if c.kind != "text"]
        receiver = real[0] if real else None
        name = node.attrs["name"]
        if receiver is not None and receiver.kind == "this":
            class_name = scope.method.class_name if scope.method else None
            if class_name and (class_name, name) in self.fields_by_class:
                return self._field_node(scope.unit, class_name, name)
        if receiver is not None and receiver.kind == "name":
            cls = receiver.attrs["name"]
            if (cls, name) in self.fields_by_class:
                unit = self.fields_by_class[(cls, name)][0]
                return self._field_node(unit, cls, name)
            # receiver may itself be data (obj.field): treat as opaque
            self._walk_expr(receiver, scope)
        return None

    def _lvalue_targets(self, lhs: Node, scope: _Scope) -> list[tuple[str, EdgeKind]]:
        if lhs.kind == "name":
            name = lhs.attrs["name"]
            if name in scope.locals:
                return [(scope.locals[name], EdgeKind.ASSIGN)]
            class_name = scope.method.class_name if scope.method else None
            if class_name and (class_name, name) in self.fields_by_class:
                return [(self._field_node(scope.unit, class_name, name),
                         EdgeKind.FIELD_STORE)]
            return [(self._var_node(scope, name, lhs), EdgeKind.ASSIGN)]
        if lhs.kind == "fieldaccess":
            resolved = self._resolve_field_access(lhs, scope)
            return [(resolved, EdgeKind.FIELD_STORE)] if resolved else []
        if lhs.kind == "index":
            real = [c for c in lhs.children if c.kind != "text"]
            targets = []
            for out in self._walk_expr(real[0], scope):
                targets.append((out, EdgeKind.COLLECTION_INSERT))
            if len(real) > 1:
                self._walk_expr(real[1], scope)
            return targets
        self._walk_expr(lhs, scope)
        return []

    def _walk_call(self, node: Node, scope: _Scope) -> list[str]:
        element = self.element_by_node.get(id(node))
        call_element_id = element.id if element else None
        name = node.attrs.get("name", "")
        args = _call_args(node)
        receiver = _call_receiver(node)

        arg_node_ids: list[str] = []
        for i, arg in enumerate(args):
            outs = self._walk_expr(arg, scope)
            arg_id = self._occurrence_node(
                scope, "callarg", arg, f"{name} arg{i}", suffix=f"#a{i}",
                call_element_id=call_element_id)
            for out in outs:
                self.graph.add_edge(out, arg_id, EdgeKind.ASSIGN)
            arg_node_ids.append(arg_id)

        lowered = name.lower()
        collection_op = (lowered in _COLLECTION_INSERT_METHODS
                         or lowered in _COLLECTION_READ_METHODS)
        receiver_target: str | None = None
        if receiver is not None:
            if receiver.kind == "name":
                receiver_target = self._resolve_name(receiver.attrs["name"], scope)
                if receiver_target is None and collection_op:
                    # Collections taint wholesale even when the container is
                    # declared outside the analyzed subset.
                    receiver_target = self._var_node(scope, receiver.attrs["name"],
                                                     receiver)
            elif receiver.kind == "fieldaccess":
                receiver_target = self._resolve_field_access(receiver, scope)
            else:
                self._walk_expr(receiver, scope)

        ret_id = self._occurrence_node(
            scope, "callret", node, f"{name}()", suffix="#ret",
            call_element_id=call_element_id)
        if receiver_target is not None:
            if lowered in _COLLECTION_INSERT_METHODS:
                for arg_id in arg_node_ids:
                    self.graph.add_edge(arg_id, receiver_target,
                                        EdgeKind.COLLECTION_INSERT)
            if lowered in _COLLECTION_READ_METHODS:
                self.graph.add_edge(receiver_target, ret_id, EdgeKind.COLLECTION_READ)

        for target_unit, target in self.methods_by_sig.get((name, len(args)), []):
            if target.body is None:
                continue
            target_scope = _Scope(target_unit, target)
            for i, param in enumerate(target.params):
                param_nodes = [c for c in target.node.children if c.kind == "param"]
                param_node = param_nodes[i] if i < len(param_nodes) else None
                param_id = self._var_node(target_scope, param.name, param_node,
                                          param.type_name)
                self.graph.add_edge(arg_node_ids[i], param_id, EdgeKind.ARG_TO_PARAM)
            ret_node_id = f"return:{target.method_id}"
            if ret_node_id in self.graph.nodes:
                self.graph.add_edge(ret_node_id, ret_id, EdgeKind.RETURN_TO_CALLER)
        return [ret_id]


def build_flow_graph(units: list[SourceUnit],
                     elements_by_unit: dict[str, list[CodeElement]] | None = None) -> FlowGraph:
    """Construct the corpus-wide taint graph.

    ``elements_by_unit`` links graph nodes back to extracted elements; when
    omitted it is recomputed here.
    """
    if elements_by_unit is None:
        from ..javasrc import extract_elements

        elements_by_unit = {unit.path: extract_elements(unit) for unit in units}
    return _GraphBuilder(units, elements_by_unit).build()
