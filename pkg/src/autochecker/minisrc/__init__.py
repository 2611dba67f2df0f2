"""The reference object-oriented source language: parser and AST utilities."""

from .nodes import NODE_TYPES, AstNode, node_types_present, render_ast, structural_hash
from .parser import parse_source, tokenize

__all__ = [
    "NODE_TYPES",
    "AstNode",
    "node_types_present",
    "parse_source",
    "render_ast",
    "structural_hash",
    "tokenize",
]
