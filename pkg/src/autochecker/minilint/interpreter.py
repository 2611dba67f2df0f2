"""Execution of compiled checkers over source ASTs."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import CheckerRuntimeError
from ..minisrc.nodes import AstNode
from .apis import implementation
from .compiler import CompiledChecker
from .dsl import BinOp, Call, ForEach, If, Let, Literal, Name, Not, Report


@dataclass(frozen=True, order=True)
class Violation:
    line: int
    message: str


class _Interp:
    def __init__(self, compiled: CompiledChecker):
        self.compiled = compiled
        self.found: list[Violation] = []

    def block(self, body, env: dict) -> None:
        env = dict(env)
        for stmt in body:
            if isinstance(stmt, Let):
                env[stmt.name] = self.eval(stmt.value, env)
            elif isinstance(stmt, If):
                if self.truth(self.eval(stmt.cond, env), stmt.line):
                    self.block(stmt.then, env)
                elif stmt.orelse is not None:
                    self.block(stmt.orelse, env)
            elif isinstance(stmt, ForEach):
                items = self.eval(stmt.iterable, env)
                if not isinstance(items, list):
                    raise CheckerRuntimeError("for-each over a non-list value", stmt.line)
                for item in items:
                    self.block(stmt.body, {**env, stmt.var: item})
            elif isinstance(stmt, Report):
                node = self.eval(stmt.node, env)
                if not isinstance(node, AstNode):
                    raise CheckerRuntimeError("report() on a null node", stmt.line)
                self.found.append(Violation(node.span[0], stmt.message))

    @staticmethod
    def truth(value, line: int) -> bool:
        if not isinstance(value, bool):
            raise CheckerRuntimeError(f"expected a boolean, got {value!r}", line)
        return value

    def eval(self, e, env: dict):
        if isinstance(e, Literal):
            return e.value
        if isinstance(e, Name):
            if e.ident in env:
                return env[e.ident]
            return e.ident  # type literal or namespace; the compiler vouched for it
        if isinstance(e, Not):
            return not self.truth(self.eval(e.operand, env), e.line)
        if isinstance(e, BinOp):
            if e.op == "&&":
                return self.truth(self.eval(e.left, env), e.line) and self.truth(
                    self.eval(e.right, env), e.line
                )
            if e.op == "||":
                return self.truth(self.eval(e.left, env), e.line) or self.truth(
                    self.eval(e.right, env), e.line
                )
            left, right = self.eval(e.left, env), self.eval(e.right, env)
            if e.op == "==":
                return left is right if isinstance(left, AstNode) else left == right
            if e.op == "!=":
                return left is not right if isinstance(left, AstNode) else left != right
            if not isinstance(left, int) or not isinstance(right, int):
                raise CheckerRuntimeError(f"{e.op!r} on non-int values", e.line)
            return {"<": left < right, ">": left > right, "<=": left <= right, ">=": left >= right}[e.op]
        if isinstance(e, Call):
            return self.call(e, env)
        raise TypeError(e)  # pragma: no cover

    def call(self, e: Call, env: dict):
        candidates = self.compiled.resolved[e.site]
        recv = self.eval(e.receiver, env)
        args = [self.eval(a, env) for a in e.args]
        entries = self.compiled.entries
        first = entries[candidates[0]]
        if first.kind == "util":
            api_id, call_args = first.id, args
        else:
            if not isinstance(recv, AstNode):
                raise CheckerRuntimeError("method call on null", e.line, e.describe())
            if first.kind == "edge" or len(candidates) == 1:
                api_id = first.id
                if first.kind == "node" and first.owner_type != recv.node_type:
                    raise CheckerRuntimeError(
                        f"{recv.node_type} has no method {e.method}", e.line, e.describe()
                    )
            else:
                matching = [c for c in candidates if entries[c].owner_type == recv.node_type]
                if not matching:
                    raise CheckerRuntimeError(
                        f"{recv.node_type} has no method {e.method}", e.line, e.describe()
                    )
                api_id = matching[0]
            call_args = [recv, *args]
        impl = implementation(api_id)
        if impl is None:
            raise CheckerRuntimeError(f"no implementation for {api_id}", e.line, e.describe())
        try:
            return impl(*call_args)
        except (IndexError, AttributeError, TypeError, ValueError) as exc:
            raise CheckerRuntimeError(str(exc), e.line, e.describe()) from exc


def run_checker(compiled: CompiledChecker, ast: AstNode) -> list[Violation]:
    """Fire visitor blocks in depth-first pre-order; violations come back sorted."""
    interp = _Interp(compiled)
    visitors = compiled.script.visitors
    for node in ast.walk():
        for visitor in visitors:
            if visitor.node_type == node.node_type:
                interp.block(visitor.body, {visitor.var: node})
    return sorted(interp.found)
