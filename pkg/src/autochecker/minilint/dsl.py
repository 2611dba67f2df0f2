"""Syntax of the checker DSL (``.check`` files).

::

    checker  := use* visitor+
    use      := 'use' IDENT ';'
    visitor  := 'on' IDENT 'as' IDENT block
    block    := '{' stmt* '}'
    stmt     := 'let' IDENT '=' expr ';'
              | 'if' '(' expr ')' block ('else' (block | if))?
              | 'for' IDENT 'in' expr block
              | 'report' '(' expr ',' STRING ')' ';'
    expr     := and ('||' and)*
    and      := not ('&&' not)*
    not      := '!' not | cmp
    cmp      := postfix (('==' | '!=' | '<' | '>' | '<=' | '>=') postfix)?
    postfix  := primary ('.' IDENT '(' args ')')*
    primary  := IDENT | IDENT '(' args ')' | STRING | INT
              | 'true' | 'false' | 'null' | '(' expr ')'

A bare identifier is a variable, a node type literal (``descendants(FieldDecl)``)
or a util namespace (``AstUtil.isNullLiteral(x)``); the compiler decides which.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

KEYWORDS = frozenset(
    {"use", "on", "as", "let", "if", "else", "for", "in", "report", "true", "false", "null"}
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<int>[0-9]+)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<op>==|!=|<=|>=|&&|\|\||[<>!.,;(){}=])
    """,
    re.VERBOSE,
)


class DslSyntaxError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Tok:
    kind: str
    text: str
    line: int
    col: int


# -- syntax tree -----------------------------------------------------------------


@dataclass
class Name:
    ident: str
    line: int


@dataclass
class Literal:
    value: object  # str, int, bool or None
    line: int


@dataclass
class Call:
    receiver: Optional["Expr"]
    method: str
    args: list["Expr"]
    line: int
    site: int

    def describe(self) -> str:
        recv = "" if self.receiver is None else f"{_short(self.receiver)}."
        return f"{recv}{self.method}(...)"


@dataclass
class Not:
    operand: "Expr"
    line: int


@dataclass
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    line: int


Expr = Union[Name, Literal, Call, Not, BinOp]


def _short(expr: Expr) -> str:
    if isinstance(expr, Name):
        return expr.ident
    if isinstance(expr, Call):
        return expr.describe()
    return "<expr>"


@dataclass
class Let:
    name: str
    value: Expr
    line: int


@dataclass
class If:
    cond: Expr
    then: list["Stmt"]
    orelse: Optional[list["Stmt"]]
    line: int


@dataclass
class ForEach:
    var: str
    iterable: Expr
    body: list["Stmt"]
    line: int


@dataclass
class Report:
    node: Expr
    message: str
    line: int


Stmt = Union[Let, If, ForEach, Report]


@dataclass
class Use:
    name: str
    line: int


@dataclass
class Visitor:
    node_type: str
    var: str
    body: list[Stmt]
    line: int


@dataclass
class CheckerScript:
    uses: list[Use] = field(default_factory=list)
    visitors: list[Visitor] = field(default_factory=list)
    num_sites: int = 0


# -- lexer / parser ------------------------------------------------------------------


def tokenize(text: str) -> list[Tok]:
    text = text.replace("\r\n", "\n")
    toks = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DslSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind, chunk = m.lastgroup, m.group()
        if kind not in ("ws", "comment"):
            if kind == "ident" and chunk in KEYWORDS:
                kind = "keyword"
            toks.append(Tok(kind, chunk, line, col))
        nl = chunk.count("\n")
        if nl:
            line += nl
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    toks.append(Tok("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, toks: list[Tok]):
        self.toks = toks
        self.pos = 0
        self.sites = 0

    @property
    def tok(self) -> Tok:
        return self.toks[self.pos]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "keyword") and self.tok.text == text

    def advance(self) -> Tok:
        tok = self.tok
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def fail(self, message: str) -> DslSyntaxError:
        found = "end of input" if self.tok.kind == "eof" else repr(self.tok.text)
        return DslSyntaxError(f"{message}, found {found}", self.tok.line, self.tok.col)

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            raise self.fail(f"expected {text!r}")
        return self.advance()

    def ident(self) -> Tok:
        if self.tok.kind != "ident":
            raise self.fail("expected identifier")
        return self.advance()

    def script(self) -> CheckerScript:
        script = CheckerScript()
        while self.at("use"):
            tok = self.advance()
            script.uses.append(Use(self.ident().text, tok.line))
            self.expect(";")
        while self.at("on"):
            tok = self.advance()
            node_type = self.ident().text
            self.expect("as")
            var = self.ident().text
            script.visitors.append(Visitor(node_type, var, self.block(), tok.line))
        if self.tok.kind != "eof":
            raise self.fail("expected 'on' visitor block")
        script.num_sites = self.sites
        return script

    def block(self) -> list[Stmt]:
        self.expect("{")
        body = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                raise self.fail("expected '}'")
            body.append(self.stmt())
        self.advance()
        return body

    def stmt(self) -> Stmt:
        tok = self.tok
        if self.at("let"):
            self.advance()
            name = self.ident().text
            self.expect("=")
            value = self.expr()
            self.expect(";")
            return Let(name, value, tok.line)
        if self.at("if"):
            return self.if_stmt()
        if self.at("for"):
            self.advance()
            var = self.ident().text
            self.expect("in")
            iterable = self.expr()
            return ForEach(var, iterable, self.block(), tok.line)
        if self.at("report"):
            self.advance()
            self.expect("(")
            node = self.expr()
            self.expect(",")
            if self.tok.kind != "string":
                raise self.fail("expected string message")
            message = _unquote(self.advance().text)
            self.expect(")")
            self.expect(";")
            return Report(node, message, tok.line)
        raise self.fail("expected statement")

    def if_stmt(self) -> If:
        tok = self.expect("if")
        self.expect("(")
        cond = self.expr()
        self.expect(")")
        then = self.block()
        orelse = None
        if self.at("else"):
            self.advance()
            orelse = [self.if_stmt()] if self.at("if") else self.block()
        return If(cond, then, orelse, tok.line)

    def expr(self) -> Expr:
        left = self.and_expr()
        while self.at("||"):
            tok = self.advance()
            left = BinOp("||", left, self.and_expr(), tok.line)
        return left

    def and_expr(self) -> Expr:
        left = self.not_expr()
        while self.at("&&"):
            tok = self.advance()
            left = BinOp("&&", left, self.not_expr(), tok.line)
        return left

    def not_expr(self) -> Expr:
        if self.at("!"):
            tok = self.advance()
            return Not(self.not_expr(), tok.line)
        return self.cmp_expr()

    def cmp_expr(self) -> Expr:
        left = self.postfix()
        if self.tok.kind == "op" and self.tok.text in ("==", "!=", "<", ">", "<=", ">="):
            tok = self.advance()
            return BinOp(tok.text, left, self.postfix(), tok.line)
        return left

    def call(self, receiver: Optional[Expr], name_tok: Tok) -> Call:
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.expr())
            while self.at(","):
                self.advance()
                args.append(self.expr())
        self.expect(")")
        site = self.sites
        self.sites += 1
        return Call(receiver, name_tok.text, args, name_tok.line, site)

    def postfix(self) -> Expr:
        node = self.primary()
        while self.at("."):
            self.advance()
            node = self.call(node, self.ident())
        return node

    def primary(self) -> Expr:
        tok = self.tok
        if tok.kind == "ident":
            self.advance()
            if self.at("("):
                return self.call(None, tok)
            return Name(tok.text, tok.line)
        if tok.kind == "string":
            self.advance()
            return Literal(_unquote(tok.text), tok.line)
        if tok.kind == "int":
            self.advance()
            return Literal(int(tok.text), tok.line)
        if self.at("true") or self.at("false"):
            self.advance()
            return Literal(tok.text == "true", tok.line)
        if self.at("null"):
            self.advance()
            return Literal(None, tok.line)
        if self.at("("):
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        raise self.fail("expected expression")


def _unquote(raw: str) -> str:
    return re.sub(r"\\(.)", lambda m: {"n": "\n", "t": "\t"}.get(m.group(1), m.group(1)), raw[1:-1])


def parse_script(text: str) -> CheckerScript:
    return _Parser(tokenize(text)).script()
