"""AST node representation for the reference source language."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

NODE_TYPES: tuple[str, ...] = (
    "CompilationUnit",
    "ImportDecl",
    "ClassDecl",
    "FieldDecl",
    "MethodDecl",
    "CtorDecl",
    "Param",
    "Block",
    "IfStmt",
    "WhileStmt",
    "ForStmt",
    "ReturnStmt",
    "ThrowStmt",
    "TryStmt",
    "CatchClause",
    "ExprStmt",
    "VarDeclStmt",
    "AssignExpr",
    "BinaryExpr",
    "UnaryExpr",
    "CallExpr",
    "FieldAccess",
    "NameRef",
    "NewExpr",
    "IntLit",
    "StringLit",
    "NullLit",
)

MODIFIERS = frozenset({"public", "private", "static", "final"})

Span = tuple[int, int, int, int]


@dataclass(eq=False)
class AstNode:
    """One node of a parsed compilation unit.

    ``span`` is ``(line, col, end_line, end_col)``; all 1-based and the end
    position is inclusive (it points at the last character of the node).

    Besides ``name`` and ``modifiers``, a few node types carry extra data:
    ``type_name`` for declarations and ``new``, ``op`` for operators,
    ``value`` and ``image`` for literals (``octal`` flags int literals
    written with a leading zero), and ``role`` tags that tell accessors which child is which
    (for example the condition of an ``if``).
    """

    node_type: str
    span: Span
    children: list["AstNode"] = field(default_factory=list)
    name: Optional[str] = None
    modifiers: frozenset = frozenset()
    type_name: Optional[str] = None
    op: Optional[str] = None
    value: object = None
    image: Optional[str] = None
    octal: bool = False
    role: Optional[str] = None
    parent: Optional["AstNode"] = field(default=None, repr=False)

    def __post_init__(self):
        if self.node_type not in NODE_TYPES:
            raise ValueError(f"unknown node type {self.node_type!r}")
        for child in self.children:
            child.parent = self

    @property
    def line(self) -> int:
        return self.span[0]

    def child_with_role(self, role: str) -> Optional["AstNode"]:
        for child in self.children:
            if child.role == role:
                return child
        return None

    def walk(self) -> Iterator["AstNode"]:
        """Depth-first pre-order traversal, including ``self``."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def root(self) -> "AstNode":
        node = self
        while node.parent is not None:
            node = node.parent
        return node

    def ancestors(self) -> Iterator["AstNode"]:
        node = self.parent
        while node is not None:
            yield node
            node = node.parent

    def __repr__(self) -> str:
        label = self.node_type if self.name is None else f"{self.node_type}({self.name})"
        return f"<{label} @{self.span[0]}:{self.span[1]}>"


def render_ast(ast: AstNode, augment: bool = True) -> str:
    """Indented one-node-per-line dump, two spaces per depth level.

    With ``augment`` the identifier a node was parsed from is appended, e.g.
    ``MethodDecl(length)``.
    """
    lines = []

    def visit(node: AstNode, depth: int) -> None:
        label = node.node_type
        if augment and node.name is not None:
            label = f"{label}({node.name})"
        lines.append("  " * depth + label)
        for child in node.children:
            visit(child, depth + 1)

    visit(ast, 0)
    return "\n".join(lines) + "\n"


def node_types_present(ast: AstNode) -> set[str]:
    return {node.node_type for node in ast.walk()}


def structural_hash(ast: AstNode) -> str:
    """Digest over every observable field of the tree; used to prove purity.

    Parents are identified by their pre-order position, so equal trees hash
    equal across parses.
    """
    import hashlib

    h = hashlib.sha256()
    order = {id(n): i for i, n in enumerate(ast.walk())}
    for node in ast.walk():
        h.update(
            repr(
                (
                    node.node_type,
                    node.span,
                    node.name,
                    sorted(node.modifiers),
                    node.type_name,
                    node.op,
                    node.value,
                    node.image,
                    node.octal,
                    node.role,
                    len(node.children),
                    None if node.parent is None else order.get(id(node.parent), -1),
                )
            ).encode()
        )
    return h.hexdigest()
