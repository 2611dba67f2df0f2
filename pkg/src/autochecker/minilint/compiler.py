"""Static resolution of checker scripts against an API catalog.

"Compiling" a checker means: parse it, make sure every referenced type,
namespace and method exists in the catalog, and type-check expressions well
enough that every call site maps to concrete catalog entries.  Names that
exist nowhere in the catalog are collected as unknown names; everything else
that is wrong becomes a type error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..catalog import EDGE, NODE, UTIL, ApiEntry
from ..errors import CompileError
from .dsl import (
    BinOp,
    Call,
    CheckerScript,
    DslSyntaxError,
    Expr,
    ForEach,
    If,
    Let,
    Literal,
    Name,
    Not,
    Report,
    Stmt,
    parse_script,
)

# Static types: ("bool",) ("int",) ("str",) ("null",) ("node", T|None)
# ("list", T|None) ("type", T) ("ns", name) ("any",).  "any" absorbs errors.
BOOL, INT, STR, NULL, ANY = ("bool",), ("int",), ("str",), ("null",), ("any",)

_SCALARS = {
    "boolean": BOOL,
    "bool": BOOL,
    "java.lang.boolean": BOOL,
    "int": INT,
    "integer": INT,
    "long": INT,
    "string": STR,
    "java.lang.string": STR,
}


@dataclass(frozen=True)
class CompiledChecker:
    script: CheckerScript
    # call site -> candidate ApiEntry ids (one unless the receiver is an untyped node)
    resolved: dict[int, tuple[str, ...]]
    entries: dict[str, ApiEntry]
    source: str

    @property
    def visitors(self):
        return [(v.node_type, v.body) for v in self.script.visitors]


class _CatalogIndex:
    def __init__(self, catalog: list[ApiEntry]):
        self.entries = {e.id: e for e in catalog}
        self.edge: dict[str, ApiEntry] = {}
        self.node: dict[tuple[str, str], ApiEntry] = {}
        self.node_by_method: dict[str, list[ApiEntry]] = {}
        self.util: dict[tuple[str, str], ApiEntry] = {}
        self.types: set[str] = set()
        self.namespaces: set[str] = set()
        self.methods: set[str] = set()
        for e in catalog:
            self.methods.add(e.method_name)
            if e.kind == EDGE:
                self.edge.setdefault(e.method_name, e)
                self.types.add(e.owner_type)
            elif e.kind == NODE:
                self.node.setdefault((e.owner_type, e.method_name), e)
                self.node_by_method.setdefault(e.method_name, []).append(e)
                self.types.add(e.owner_type)
            elif e.kind == UTIL:
                self.util.setdefault((e.owner_type, e.method_name), e)
                self.namespaces.add(e.owner_type)
        self.abstract_types = {e.owner_type for e in catalog if e.kind == EDGE}


def _fmt(t: tuple) -> str:
    if t[0] in ("node", "list"):
        inner = t[1] or "Node"
        return inner if t[0] == "node" else f"List<{inner}>"
    return t[0] if len(t) == 1 else f"{t[0]} {t[1]}"


class _Checker:
    def __init__(self, index: _CatalogIndex):
        self.ix = index
        self.unknown: list[tuple[str, int]] = []
        self.errors: list[tuple[str, int]] = []
        self.resolved: dict[int, tuple[str, ...]] = {}
        self.imported: set[str] = set()

    # -- diagnostics -----------------------------------------------------------

    def unknown_name(self, name: str, line: int) -> None:
        if (name, line) not in self.unknown:
            self.unknown.append((name, line))

    def error(self, message: str, line: int) -> None:
        self.errors.append((message, line))

    def require_import(self, name: str, line: int) -> None:
        if name not in self.imported:
            self.error(f"{name} is used but not imported (missing 'use {name};')", line)

    # -- types ----------------------------------------------------------------------

    def _type_from_catalog(self, type_name: str) -> tuple:
        key = type_name.strip()
        if key.lower() in _SCALARS:
            return _SCALARS[key.lower()]
        if key.startswith("List<") and key.endswith(">"):
            inner = key[5:-1].strip()
            return ("list", None if inner in self.ix.abstract_types else inner)
        if key in self.ix.abstract_types:
            return ("node", None)
        if key in self.ix.types:
            return ("node", key)
        return ANY

    def _accepts(self, param: str, arg: tuple) -> bool:
        if arg == ANY:
            return True
        if param == "NodeType":
            return arg[0] == "type"
        expected = self._type_from_catalog(param)
        if expected == ANY:
            return True
        if expected[0] == "node":
            if arg == NULL:
                return True
            return arg[0] == "node" and (expected[1] is None or arg[1] in (None, expected[1]))
        if expected == STR and arg == NULL:
            return True
        return expected == arg

    # -- script ---------------------------------------------------------------------------

    def script(self, script: CheckerScript) -> None:
        for use in script.uses:
            if use.name in self.ix.types or use.name in self.ix.namespaces:
                self.imported.add(use.name)
            else:
                self.unknown_name(use.name, use.line)
        if not script.visitors:
            self.error("no visitor block", 1)
        for visitor in script.visitors:
            if visitor.node_type not in self.ix.types or visitor.node_type in self.ix.abstract_types:
                if visitor.node_type in self.ix.types:
                    self.error(f"cannot visit abstract type {visitor.node_type}", visitor.line)
                else:
                    self.unknown_name(visitor.node_type, visitor.line)
                node_t = ("node", None)
            else:
                self.require_import(visitor.node_type, visitor.line)
                node_t = ("node", visitor.node_type)
            self.block(visitor.body, [{visitor.var: node_t}])

    def block(self, body: list[Stmt], scopes: list[dict]) -> None:
        scopes = scopes + [{}]
        for stmt in body:
            self.stmt(stmt, scopes)

    def stmt(self, stmt: Stmt, scopes: list[dict]) -> None:
        if isinstance(stmt, Let):
            scopes[-1][stmt.name] = self.expr(stmt.value, scopes)
        elif isinstance(stmt, If):
            self.expect_bool(self.expr(stmt.cond, scopes), "if condition", stmt.line)
            self.block(stmt.then, scopes)
            if stmt.orelse is not None:
                self.block(stmt.orelse, scopes)
        elif isinstance(stmt, ForEach):
            it = self.expr(stmt.iterable, scopes)
            if it == ANY:
                elem = ANY
            elif it[0] == "list":
                elem = ("node", it[1])
            else:
                self.error(f"cannot iterate over {_fmt(it)}", stmt.line)
                elem = ANY
            self.block(stmt.body, scopes + [{stmt.var: elem}])
        elif isinstance(stmt, Report):
            t = self.expr(stmt.node, scopes)
            if t != ANY and t[0] != "node":
                self.error(f"report() needs a node, got {_fmt(t)}", stmt.line)
        else:  # pragma: no cover - parser produces nothing else
            raise TypeError(stmt)

    def expect_bool(self, t: tuple, what: str, line: int) -> None:
        if t not in (BOOL, ANY):
            self.error(f"{what} must be boolean, got {_fmt(t)}", line)

    # -- expressions --------------------------------------------------------------------------

    def expr(self, e: Expr, scopes: list[dict]) -> tuple:
        if isinstance(e, Literal):
            if e.value is None:
                return NULL
            if isinstance(e.value, bool):
                return BOOL
            return INT if isinstance(e.value, int) else STR
        if isinstance(e, Name):
            for scope in reversed(scopes):
                if e.ident in scope:
                    return scope[e.ident]
            if e.ident in self.ix.types:
                self.require_import(e.ident, e.line)
                return ("type", e.ident)
            if e.ident in self.ix.namespaces:
                self.require_import(e.ident, e.line)
                return ("ns", e.ident)
            self.unknown_name(e.ident, e.line)
            return ANY
        if isinstance(e, Not):
            self.expect_bool(self.expr(e.operand, scopes), "operand of '!'", e.line)
            return BOOL
        if isinstance(e, BinOp):
            return self.binop(e, scopes)
        if isinstance(e, Call):
            return self.call(e, scopes)
        raise TypeError(e)  # pragma: no cover

    def binop(self, e: BinOp, scopes: list[dict]) -> tuple:
        left = self.expr(e.left, scopes)
        right = self.expr(e.right, scopes)
        if e.op in ("&&", "||"):
            self.expect_bool(left, f"left operand of {e.op!r}", e.line)
            self.expect_bool(right, f"right operand of {e.op!r}", e.line)
        elif e.op in ("<", ">", "<=", ">="):
            for side in (left, right):
                if side not in (INT, ANY):
                    self.error(f"{e.op!r} needs int operands, got {_fmt(side)}", e.line)
        elif ANY not in (left, right) and NULL not in (left, right):
            if left[0] != right[0] or left[0] in ("type", "ns", "list"):
                self.error(f"cannot compare {_fmt(left)} with {_fmt(right)}", e.line)
        return BOOL

    def call(self, e: Call, scopes: list[dict]) -> tuple:
        args = [self.expr(a, scopes) for a in e.args]
        if e.method not in self.ix.methods:
            self.unknown_name(e.method, e.line)
            if e.receiver is not None:
                self.expr(e.receiver, scopes)
            return ANY
        if e.receiver is None:
            self.error(f"{e.method}() must be called on a node or a util namespace", e.line)
            return ANY
        recv = self.expr(e.receiver, scopes)
        if recv == ANY:
            return ANY
        candidates = self.candidates(e, recv)
        if not candidates:
            return ANY
        first = candidates[0]
        for c in candidates[1:]:
            if c.param_types != first.param_types or c.return_type != first.return_type:
                self.error(
                    f"call to {e.method}() on an untyped node is ambiguous across node types",
                    e.line,
                )
                return ANY
        if len(args) != len(first.param_types):
            self.error(
                f"{e.method}() takes {len(first.param_types)} argument(s), got {len(args)}", e.line
            )
            return ANY
        narrowed = None
        for param, arg in zip(first.param_types, args):
            if not self._accepts(param, arg):
                self.error(f"{e.method}(): expected {param}, got {_fmt(arg)}", e.line)
            if param == "NodeType" and arg[0] == "type":
                narrowed = arg[1]
        self.resolved[e.site] = tuple(c.id for c in candidates)
        result = self._type_from_catalog(first.return_type)
        if narrowed is not None and result in (("node", None), ("list", None)):
            result = (result[0], narrowed)
        return result

    def candidates(self, e: Call, recv: tuple) -> list[ApiEntry]:
        kind = recv[0]
        if kind == "ns":
            entry = self.ix.util.get((recv[1], e.method))
            if entry is None:
                self.error(f"{recv[1]} has no util method {e.method}", e.line)
                return []
            return [entry]
        if kind != "node":
            self.error(f"cannot call {e.method}() on {_fmt(recv)}", e.line)
            return []
        if e.method in self.ix.edge:
            return [self.ix.edge[e.method]]
        if recv[1] is not None:
            entry = self.ix.node.get((recv[1], e.method))
            if entry is None:
                self.error(f"{recv[1]} has no method {e.method}", e.line)
                return []
            return [entry]
        found = self.ix.node_by_method.get(e.method, [])
        if not found:
            self.error(f"{e.method} is not a node method", e.line)
        return list(found)


def compile_checker(source: str, catalog: list[ApiEntry]) -> CompiledChecker:
    """Resolve ``source`` against ``catalog``; raises :class:`CompileError`."""
    if not source.strip():
        raise CompileError(type_errors=[("no visitor block", 1)])
    try:
        script = parse_script(source)
    except DslSyntaxError as exc:
        raise CompileError(type_errors=[(f"syntax error: {exc.message}", exc.line)]) from exc
    checker = _Checker(_CatalogIndex(catalog))
    checker.script(script)
    if checker.unknown or checker.errors:
        raise CompileError(checker.unknown, checker.errors)
    return CompiledChecker(script, checker.resolved, checker.ix.entries, source)
