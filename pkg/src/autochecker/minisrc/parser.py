"""Lexer and recursive-descent parser for ``.minisrc`` files.

Grammar (informal)::

    unit      := import* class+
    import    := 'import' IDENT ('.' IDENT)* ('.' '*')? ';'
    class     := modifier* 'class' IDENT '{' member* '}'
    member    := class
               | modifier* IDENT '(' params ')' block            # constructor
               | modifier* type IDENT '(' params ')' block       # method
               | modifier* type IDENT ('=' expr)? ';'            # field
    stmt      := block | if | while | for | return | throw | try
               | 'final'? type IDENT ('=' expr)? ';' | expr ';'
    expr      := assign
    assign    := or ('=' assign)?                                # right-assoc
    or        := and ('||' and)*
    and       := eq ('&&' eq)*
    eq        := rel (('==' | '!=') rel)*
    rel       := add ('<' add)*
    add       := mul (('+' | '-') mul)*
    mul       := unary (('*' | '/') unary)*
    unary     := '!' unary | postfix
    postfix   := primary ('.' IDENT ('(' args ')')?)*
    primary   := IDENT ('(' args ')')? | INT | STRING | 'null'
               | 'new' type '(' args ')' | '(' expr ')'

``this``, ``true`` and ``false`` are ordinary names.  ``//`` starts a line
comment.  An int literal with a leading ``0`` is flagged octal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from ..errors import ParseError
from .nodes import MODIFIERS, AstNode

KEYWORDS = frozenset(
    {
        "import", "class", "public", "private", "static", "final", "if", "else",
        "while", "for", "return", "throw", "try", "catch", "new", "null",
    }
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<int>[0-9]+)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<op>==|!=|&&|\|\||[=<+\-*/!.,;(){}])
    """,
    re.VERBOSE,
)

_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\", "r": "\r"}


@dataclass(frozen=True)
class Token:
    kind: str  # ident, keyword, int, string, op, eof
    text: str
    line: int
    col: int
    end_line: int
    end_col: int


def tokenize(text: str) -> list[Token]:
    text = text.replace("\r\n", "\n")
    tokens: list[Token] = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            if kind == "ident" and chunk in KEYWORDS:
                kind = "keyword"
            tokens.append(Token(kind, chunk, line, col, line, col + len(chunk) - 1))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    tokens.append(Token("eof", "", line, col, line, col))
    return tokens


def _unescape(raw: str) -> str:
    return re.sub(r"\\(.)", lambda m: _ESCAPES.get(m.group(1), m.group(1)), raw[1:-1])


def _span(first: Token | AstNode, last: Token | AstNode) -> tuple[int, int, int, int]:
    if isinstance(first, AstNode):
        start = first.span[:2]
    else:
        start = (first.line, first.col)
    if isinstance(last, AstNode):
        end = last.span[2:]
    else:
        end = (last.end_line, last.end_col)
    return (*start, *end)


def _with_role(node: Optional[AstNode], role: str) -> Optional[AstNode]:
    if node is not None:
        node.role = role
    return node


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token helpers ----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "keyword") and self.tok.text == text

    def advance(self) -> Token:
        tok = self.tok
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, message: str) -> ParseError:
        tok = self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        return ParseError(f"{message}, found {found}", tok.line, tok.col)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}")
        return self.advance()

    def expect_ident(self) -> Token:
        if self.tok.kind != "ident":
            raise self.error("expected identifier")
        return self.advance()

    # -- declarations -----------------------------------------------------

    def unit(self) -> AstNode:
        if self.tok.kind == "eof":
            raise ParseError("empty compilation unit", 1, 1)
        first = self.tok
        children = []
        while self.at("import"):
            children.append(self.import_decl())
        children.append(self.class_decl(self.modifiers()))
        while self.tok.kind != "eof":
            children.append(self.class_decl(self.modifiers()))
        last = self.tokens[self.pos - 1]
        return AstNode("CompilationUnit", _span(first, last), children)

    def import_decl(self) -> AstNode:
        start = self.expect("import")
        parts = [self.expect_ident().text]
        while self.at("."):
            self.advance()
            if self.at("*"):
                self.advance()
                parts.append("*")
                break
            parts.append(self.expect_ident().text)
        end = self.expect(";")
        return AstNode("ImportDecl", _span(start, end), name=".".join(parts))

    def modifiers(self) -> list[Token]:
        mods = []
        while self.tok.kind == "keyword" and self.tok.text in MODIFIERS:
            mods.append(self.advance())
        return mods

    def class_decl(self, mods: list[Token]) -> AstNode:
        start = mods[0] if mods else self.tok
        self.expect("class")
        name = self.expect_ident().text
        self.expect("{")
        members = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                raise self.error("expected '}'")
            members.append(self.member())
        end = self.expect("}")
        return AstNode(
            "ClassDecl",
            _span(start, end),
            members,
            name=name,
            modifiers=frozenset(m.text for m in mods),
        )

    def member(self) -> AstNode:
        mods = self.modifiers()
        start = mods[0] if mods else self.tok
        modset = frozenset(m.text for m in mods)
        if self.at("class"):
            return self.class_decl(mods)
        if self.tok.kind == "ident" and self.peek().text == "(":
            name = self.advance().text
            params = self.params()
            body = _with_role(self.block(), "body")
            return AstNode(
                "CtorDecl", _span(start, body), params + [body], name=name, modifiers=modset
            )
        type_name = self.type_ref()
        name = self.expect_ident().text
        if self.at("("):
            params = self.params()
            body = _with_role(self.block(), "body")
            return AstNode(
                "MethodDecl",
                _span(start, body),
                params + [body],
                name=name,
                modifiers=modset,
                type_name=type_name,
            )
        init = None
        if self.at("="):
            self.advance()
            init = _with_role(self.expr(), "init")
        end = self.expect(";")
        return AstNode(
            "FieldDecl",
            _span(start, end),
            [init] if init else [],
            name=name,
            modifiers=modset,
            type_name=type_name,
        )

    def type_ref(self) -> str:
        parts = [self.expect_ident().text]
        while self.at(".") and self.peek().kind == "ident":
            self.advance()
            parts.append(self.advance().text)
        return ".".join(parts)

    def params(self) -> list[AstNode]:
        self.expect("(")
        params = []
        if not self.at(")"):
            params.append(self.param())
            while self.at(","):
                self.advance()
                params.append(self.param())
        self.expect(")")
        return params

    def param(self) -> AstNode:
        start = self.tok
        mods = frozenset({"final"}) if self.at("final") else frozenset()
        if mods:
            self.advance()
        type_name = self.type_ref()
        name_tok = self.expect_ident()
        return AstNode(
            "Param", _span(start, name_tok), name=name_tok.text, modifiers=mods, type_name=type_name
        )

    # -- statements ---------------------------------------------------------

    def block(self) -> AstNode:
        start = self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                raise self.error("expected '}'")
            stmts.append(self.stmt())
        end = self.expect("}")
        return AstNode("Block", _span(start, end), stmts)

    def _at_var_decl(self) -> bool:
        if self.at("final"):
            return True
        if self.tok.kind != "ident":
            return False
        i = 1
        while self.peek(i).text == "." and self.peek(i + 1).kind == "ident":
            i += 2
        return self.peek(i).kind == "ident"

    def stmt(self) -> AstNode:
        tok = self.tok
        if self.at("{"):
            return self.block()
        if self.at("if"):
            self.advance()
            self.expect("(")
            cond = _with_role(self.expr(), "cond")
            self.expect(")")
            then = _with_role(self.stmt(), "then")
            children = [cond, then]
            if self.at("else"):
                self.advance()
                children.append(_with_role(self.stmt(), "else"))
            return AstNode("IfStmt", _span(tok, children[-1]), children)
        if self.at("while"):
            self.advance()
            self.expect("(")
            cond = _with_role(self.expr(), "cond")
            self.expect(")")
            body = _with_role(self.stmt(), "body")
            return AstNode("WhileStmt", _span(tok, body), [cond, body])
        if self.at("for"):
            return self.for_stmt()
        if self.at("return"):
            self.advance()
            value = None if self.at(";") else _with_role(self.expr(), "value")
            end = self.expect(";")
            return AstNode("ReturnStmt", _span(tok, end), [value] if value else [])
        if self.at("throw"):
            self.advance()
            value = _with_role(self.expr(), "value")
            end = self.expect(";")
            return AstNode("ThrowStmt", _span(tok, end), [value])
        if self.at("try"):
            return self.try_stmt()
        if self._at_var_decl():
            decl = self.var_decl()
            end = self.expect(";")
            decl.span = _span(decl, end)
            return decl
        expr = _with_role(self.expr(), "expr")
        end = self.expect(";")
        return AstNode("ExprStmt", _span(expr, end), [expr])

    def var_decl(self) -> AstNode:
        start = self.tok
        mods = frozenset()
        if self.at("final"):
            self.advance()
            mods = frozenset({"final"})
        type_name = self.type_ref()
        name_tok = self.expect_ident()
        children = []
        last: Token | AstNode = name_tok
        if self.at("="):
            self.advance()
            last = _with_role(self.expr(), "init")
            children.append(last)
        return AstNode(
            "VarDeclStmt",
            _span(start, last),
            children,
            name=name_tok.text,
            modifiers=mods,
            type_name=type_name,
        )

    def for_stmt(self) -> AstNode:
        start = self.expect("for")
        self.expect("(")
        children = []
        if not self.at(";"):
            init = self.var_decl() if self._at_var_decl() else self.expr()
            children.append(_with_role(init, "init"))
        self.expect(";")
        if not self.at(";"):
            children.append(_with_role(self.expr(), "cond"))
        self.expect(";")
        if not self.at(")"):
            children.append(_with_role(self.expr(), "update"))
        self.expect(")")
        body = _with_role(self.stmt(), "body")
        children.append(body)
        return AstNode("ForStmt", _span(start, body), children)

    def try_stmt(self) -> AstNode:
        start = self.expect("try")
        children = [_with_role(self.block(), "body")]
        if not self.at("catch"):
            raise self.error("expected 'catch'")
        while self.at("catch"):
            ctok = self.advance()
            self.expect("(")
            type_name = self.type_ref()
            name = self.expect_ident().text
            self.expect(")")
            body = _with_role(self.block(), "body")
            children.append(
                AstNode("CatchClause", _span(ctok, body), [body], name=name, type_name=type_name)
            )
        return AstNode("TryStmt", _span(start, children[-1]), children)

    # -- expressions -----------------------------------------------------------

    def expr(self) -> AstNode:
        target = self.binary(0)
        if self.at("="):
            if target.node_type not in ("NameRef", "FieldAccess"):
                raise self.error("invalid assignment target before '='")
            self.advance()
            value = self.expr()
            return AstNode(
                "AssignExpr",
                _span(target, value),
                [_with_role(target, "target"), _with_role(value, "value")],
                op="=",
            )
        return target

    _LEVELS = (("||",), ("&&",), ("==", "!="), ("<",), ("+", "-"), ("*", "/"))

    def binary(self, level: int) -> AstNode:
        if level == len(self._LEVELS):
            return self.unary()
        left = self.binary(level + 1)
        while self.tok.kind == "op" and self.tok.text in self._LEVELS[level]:
            op = self.advance().text
            right = self.binary(level + 1)
            left = AstNode(
                "BinaryExpr",
                _span(left, right),
                [_with_role(left, "left"), _with_role(right, "right")],
                op=op,
            )
        return left

    def unary(self) -> AstNode:
        if self.at("!"):
            tok = self.advance()
            operand = self.unary()
            return AstNode("UnaryExpr", _span(tok, operand), [_with_role(operand, "operand")], op="!")
        return self.postfix()

    def args(self) -> tuple[list[AstNode], Token]:
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(_with_role(self.expr(), "arg"))
            while self.at(","):
                self.advance()
                args.append(_with_role(self.expr(), "arg"))
        end = self.expect(")")
        return args, end

    def postfix(self) -> AstNode:
        node = self.primary()
        while self.at("."):
            self.advance()
            name = self.expect_ident().text
            qualifier = _with_role(node, "qualifier")
            if self.at("("):
                args, end = self.args()
                node = AstNode("CallExpr", _span(node, end), [qualifier] + args, name=name)
            else:
                node = AstNode("FieldAccess", _span(node, self.tokens[self.pos - 1]), [qualifier], name=name)
        return node

    def primary(self) -> AstNode:
        tok = self.tok
        if tok.kind == "ident":
            self.advance()
            if self.at("("):
                args, end = self.args()
                return AstNode("CallExpr", _span(tok, end), args, name=tok.text)
            return AstNode("NameRef", _span(tok, tok), name=tok.text)
        if tok.kind == "int":
            self.advance()
            octal = len(tok.text) > 1 and tok.text.startswith("0")
            if octal and all(c in "01234567" for c in tok.text):
                value = int(tok.text, 8)
            else:
                value = int(tok.text, 10)
            return AstNode("IntLit", _span(tok, tok), value=value, image=tok.text, octal=octal)
        if tok.kind == "string":
            self.advance()
            return AstNode("StringLit", _span(tok, tok), value=_unescape(tok.text), image=tok.text)
        if self.at("null"):
            self.advance()
            return AstNode("NullLit", _span(tok, tok), image="null")
        if self.at("new"):
            self.advance()
            type_name = self.type_ref()
            args, end = self.args()
            return AstNode("NewExpr", _span(tok, end), args, name=type_name, type_name=type_name)
        if self.at("("):
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        raise self.error("expected expression")


def parse_source(text: str) -> AstNode:
    """Parse a compilation unit; raises :class:`ParseError` on the first error."""
    return _Parser(tokenize(text)).unit()
