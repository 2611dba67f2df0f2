"""API surface of the reference lint backend.

Every API a checker script may call is registered here together with its
Python implementation.  :func:`export_manifest` turns the registry into the
manifest records consumed by :mod:`autochecker.catalog`, so the catalog the
compiler resolves against and the interpreter that executes calls can never
drift apart.

Three groups exist:

* edge APIs, declared on the abstract ``Node`` and returning nodes
  (``EDGE_API_NAMES``, 7 entries);
* node APIs, declared on concrete node types.  The non-traversal helpers of
  the abstract ``Node`` (``ABSTRACT_NODE_HELPERS``) are inherited, so they are
  exported once per concrete node type;
* util APIs, static functions in the ``AstUtil`` namespace.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from ..minisrc.nodes import NODE_TYPES, AstNode

ABSTRACT_NODE = "Node"
UTIL_NAMESPACE = "AstUtil"

# Parameter/return type vocabulary understood by the compiler.
BOOLEAN, INT, STRING, NODE, NODE_TYPE = "boolean", "int", "String", "Node", "NodeType"
NODE_LIST = "List<Node>"


@dataclass(frozen=True)
class BackendApi:
    owner_type: str
    method_name: str
    param_types: tuple[str, ...]
    return_type: str
    impl: Callable
    returns_node: bool = False
    is_static_util: bool = False
    declared_on_abstract_node: bool = False
    comment: str = ""

    @property
    def id(self) -> str:
        return f"{self.owner_type}#{self.method_name}"

    def manifest_record(self) -> dict:
        return {
            "id": self.id,
            "owner_type": self.owner_type,
            "method_name": self.method_name,
            "param_types": list(self.param_types),
            "return_type": self.return_type,
            "returns_node": self.returns_node,
            "is_static_util": self.is_static_util,
            "declared_on_abstract_node": self.declared_on_abstract_node,
            "comment": self.comment,
        }


# -- implementations ---------------------------------------------------------


def _descendants(node: AstNode, node_type: str) -> list[AstNode]:
    return [n for n in node.walk() if n is not node and n.node_type == node_type]


def _ancestors(node: AstNode, node_type: str) -> list[AstNode]:
    return [n for n in node.ancestors() if n.node_type == node_type]


def _first_parent(node: AstNode, node_type: str) -> Optional[AstNode]:
    for n in node.ancestors():
        if n.node_type == node_type:
            return n
    return None


def _get_child(node: AstNode, index: int) -> AstNode:
    if not 0 <= index < len(node.children):
        raise IndexError(f"child index {index} out of range for {node.node_type}")
    return node.children[index]


def _role(role: str) -> Callable[[AstNode], Optional[AstNode]]:
    return lambda node: node.child_with_role(role)


def _has_role(role: str) -> Callable[[AstNode], bool]:
    return lambda node: node.child_with_role(role) is not None


def _children_with_role(node: AstNode, role: str) -> list[AstNode]:
    return [c for c in node.children if c.role == role]


def _modifier(mod: str) -> Callable[[AstNode], bool]:
    return lambda node: mod in node.modifiers


def _target_name(node: AstNode) -> Optional[str]:
    target = node.child_with_role("target")
    return None if target is None else target.name


def _get_argument(node: AstNode, index: int) -> AstNode:
    args = _children_with_role(node, "arg")
    if not 0 <= index < len(args):
        raise IndexError(f"argument index {index} out of range ({len(args)} arguments)")
    return args[index]


def _is_empty_statement(node: AstNode) -> bool:
    return node.node_type == "Block" and not node.children


def _is_assignment_target(node: AstNode) -> bool:
    return node.role == "target" and node.parent is not None and node.parent.node_type == "AssignExpr"


def _enclosing_class_name(node: AstNode) -> Optional[str]:
    cls = _first_parent(node, "ClassDecl")
    return None if cls is None else cls.name


# -- registry ------------------------------------------------------------------

_EDGE = [
    ("getParent", (), NODE, lambda n: n.parent, "Returns the parent node, or null at the root."),
    ("getChildren", (), NODE_LIST, lambda n: list(n.children), ""),
    ("getChild", (INT,), NODE, _get_child, "@throws IndexError when the index is out of range"),
    ("descendants", (NODE_TYPE,), NODE_LIST, _descendants, "Pre-order, excluding this node."),
    ("ancestors", (NODE_TYPE,), NODE_LIST, _ancestors, "Nearest first."),
    ("firstParentOfType", (NODE_TYPE,), NODE, _first_parent, ""),
    ("getRoot", (), "CompilationUnit", lambda n: n.root(), ""),
]
EDGE_API_NAMES = tuple(name for name, *_ in _EDGE)

ABSTRACT_NODE_HELPERS = [
    ("getNumChildren", (), INT, lambda n: len(n.children), ""),
    ("getBeginLine", (), INT, lambda n: n.span[0], ""),
    ("getEndLine", (), INT, lambda n: n.span[2], ""),
    ("getNodeType", (), STRING, lambda n: n.node_type, ""),
    (
        "hasDescendantOfType",
        (NODE_TYPE,),
        BOOLEAN,
        lambda n, t: bool(_descendants(n, t)),
        "",
    ),
]

_VISIBILITY = [
    ("isPublic", (), BOOLEAN, _modifier("public"), ""),
    ("isPrivate", (), BOOLEAN, _modifier("private"), ""),
]

_NODE: dict[str, list] = {
    "CompilationUnit": [
        ("getNumImports", (), INT, lambda n: sum(c.node_type == "ImportDecl" for c in n.children), ""),
    ],
    "ImportDecl": [
        ("getImportedName", (), STRING, lambda n: n.name, ""),
        ("isWildcard", (), BOOLEAN, lambda n: n.name.endswith(".*"), ""),
    ],
    "ClassDecl": [
        ("getSimpleName", (), STRING, lambda n: n.name, ""),
        *_VISIBILITY,
        ("isStatic", (), BOOLEAN, _modifier("static"), ""),
        ("isFinal", (), BOOLEAN, _modifier("final"), ""),
        ("isNested", (), BOOLEAN, lambda n: n.parent is not None and n.parent.node_type == "ClassDecl", ""),
        ("getNumMembers", (), INT, lambda n: len(n.children), ""),
    ],
    "FieldDecl": [
        ("getName", (), STRING, lambda n: n.name, ""),
        ("getTypeName", (), STRING, lambda n: n.type_name, ""),
        *_VISIBILITY,
        ("isStatic", (), BOOLEAN, _modifier("static"), ""),
        ("isFinal", (), BOOLEAN, _modifier("final"), ""),
        ("hasInitializer", (), BOOLEAN, _has_role("init"), ""),
        ("getInitializer", (), NODE, _role("init"), ""),
    ],
    "MethodDecl": [
        ("getName", (), STRING, lambda n: n.name, ""),
        ("getReturnTypeName", (), STRING, lambda n: n.type_name, ""),
        *_VISIBILITY,
        ("isStatic", (), BOOLEAN, _modifier("static"), ""),
        ("isFinal", (), BOOLEAN, _modifier("final"), ""),
        ("getBody", (), "Block", _role("body"), ""),
        ("getArity", (), INT, lambda n: sum(c.node_type == "Param" for c in n.children), ""),
    ],
    "CtorDecl": [
        ("getName", (), STRING, lambda n: n.name, ""),
        *_VISIBILITY,
        ("getBody", (), "Block", _role("body"), ""),
        ("getArity", (), INT, lambda n: sum(c.node_type == "Param" for c in n.children), ""),
    ],
    "Param": [
        ("getName", (), STRING, lambda n: n.name, ""),
        ("getTypeName", (), STRING, lambda n: n.type_name, ""),
        ("isFinal", (), BOOLEAN, _modifier("final"), ""),
    ],
    "Block": [
        ("isEmpty", (), BOOLEAN, lambda n: not n.children, "True if the block has no statements."),
        ("getNumStatements", (), INT, lambda n: len(n.children), ""),
    ],
    "IfStmt": [
        ("getCondition", (), NODE, _role("cond"), ""),
        ("getThenBranch", (), NODE, _role("then"), ""),
        ("getElseBranch", (), NODE, _role("else"), ""),
        ("hasElse", (), BOOLEAN, _has_role("else"), ""),
    ],
    "WhileStmt": [
        ("getCondition", (), NODE, _role("cond"), ""),
        ("getBody", (), NODE, _role("body"), ""),
    ],
    "ForStmt": [
        ("getCondition", (), NODE, _role("cond"), ""),
        ("getBody", (), NODE, _role("body"), ""),
    ],
    "ReturnStmt": [
        ("hasValue", (), BOOLEAN, _has_role("value"), ""),
        ("getValue", (), NODE, _role("value"), ""),
    ],
    "ThrowStmt": [
        ("getThrownExpr", (), NODE, _role("value"), ""),
    ],
    "TryStmt": [
        ("getBody", (), "Block", _role("body"), ""),
        ("getNumCatches", (), INT, lambda n: sum(c.node_type == "CatchClause" for c in n.children), ""),
    ],
    "CatchClause": [
        ("getVariableName", (), STRING, lambda n: n.name, ""),
        ("getExceptionTypeName", (), STRING, lambda n: n.type_name, ""),
        ("getBody", (), "Block", _role("body"), ""),
    ],
    "ExprStmt": [
        ("getExpr", (), NODE, _role("expr"), ""),
    ],
    "VarDeclStmt": [
        ("getName", (), STRING, lambda n: n.name, ""),
        ("getTypeName", (), STRING, lambda n: n.type_name, ""),
        ("isFinal", (), BOOLEAN, _modifier("final"), ""),
        ("hasInitializer", (), BOOLEAN, _has_role("init"), ""),
        ("getInitializer", (), NODE, _role("init"), ""),
    ],
    "AssignExpr": [
        ("getTarget", (), NODE, _role("target"), ""),
        ("getValue", (), NODE, _role("value"), ""),
        ("getTargetName", (), STRING, _target_name, "Name of the assigned variable or field."),
    ],
    "BinaryExpr": [
        ("getOperator", (), STRING, lambda n: n.op, ""),
        ("getLeft", (), NODE, _role("left"), ""),
        ("getRight", (), NODE, _role("right"), ""),
    ],
    "UnaryExpr": [
        ("getOperator", (), STRING, lambda n: n.op, ""),
        ("getOperand", (), NODE, _role("operand"), ""),
    ],
    "CallExpr": [
        ("getMethodName", (), STRING, lambda n: n.name, ""),
        ("hasQualifier", (), BOOLEAN, _has_role("qualifier"), ""),
        ("getQualifier", (), NODE, _role("qualifier"), ""),
        ("getNumArguments", (), INT, lambda n: len(_children_with_role(n, "arg")), ""),
        ("getArgument", (INT,), NODE, _get_argument, ""),
    ],
    "FieldAccess": [
        ("getName", (), STRING, lambda n: n.name, ""),
        ("getQualifier", (), NODE, _role("qualifier"), ""),
    ],
    "NameRef": [
        ("getName", (), STRING, lambda n: n.name, ""),
    ],
    "NewExpr": [
        ("getTypeName", (), STRING, lambda n: n.type_name, ""),
        ("getNumArguments", (), INT, lambda n: len(n.children), ""),
    ],
    "IntLit": [
        ("getValue", (), INT, lambda n: n.value, ""),
        ("getImage", (), STRING, lambda n: n.image, ""),
        ("isOctal", (), BOOLEAN, lambda n: n.octal, "True if written with a leading zero."),
    ],
    "StringLit": [
        ("getValue", (), STRING, lambda n: n.value, ""),
        ("isEmpty", (), BOOLEAN, lambda n: n.value == "", "True if the constant value is empty."),
    ],
    "NullLit": [],
}

_UTIL = [
    ("isNullLiteral", (NODE,), BOOLEAN, lambda n: n is not None and n.node_type == "NullLit", ""),
    ("isStringLiteral", (NODE,), BOOLEAN, lambda n: n is not None and n.node_type == "StringLit", ""),
    ("isIntLiteral", (NODE,), BOOLEAN, lambda n: n is not None and n.node_type == "IntLit", ""),
    (
        "isInConstructor",
        (NODE,),
        BOOLEAN,
        lambda n: n is not None and _first_parent(n, "CtorDecl") is not None,
        "",
    ),
    (
        "isInLoop",
        (NODE,),
        BOOLEAN,
        lambda n: n is not None
        and any(a.node_type in ("WhileStmt", "ForStmt") for a in n.ancestors()),
        "",
    ),
    (
        "isEmptyStatement",
        (NODE,),
        BOOLEAN,
        lambda n: n is not None and _is_empty_statement(n),
        "True for a block without statements.",
    ),
    (
        "isCallTo",
        (NODE, STRING),
        BOOLEAN,
        lambda n, name: n is not None and n.node_type == "CallExpr" and n.name == name,
        "",
    ),
    ("isAssignmentTarget", (NODE,), BOOLEAN, lambda n: n is not None and _is_assignment_target(n), ""),
    ("getEnclosingClassName", (NODE,), STRING, lambda n: _enclosing_class_name(n), "Author: backend team"),
]


def _build_registry() -> list[BackendApi]:
    apis = []
    for name, params, ret, impl, comment in _EDGE:
        apis.append(
            BackendApi(
                ABSTRACT_NODE,
                name,
                params,
                ret,
                impl,
                returns_node=True,
                declared_on_abstract_node=True,
                comment=comment,
            )
        )
    for node_type in NODE_TYPES:
        for name, params, ret, impl, comment in _NODE[node_type]:
            apis.append(
                BackendApi(node_type, name, params, ret, impl, returns_node=_is_node_type(ret), comment=comment)
            )
        for name, params, ret, impl, comment in ABSTRACT_NODE_HELPERS:
            apis.append(BackendApi(node_type, name, params, ret, impl, comment=comment))
    for name, params, ret, impl, comment in _UTIL:
        apis.append(
            BackendApi(UTIL_NAMESPACE, name, params, ret, impl, is_static_util=True, comment=comment)
        )
    return apis


def _is_node_type(type_name: str) -> bool:
    return type_name in (NODE, NODE_LIST) or type_name in NODE_TYPES


REGISTRY: tuple[BackendApi, ...] = tuple(_build_registry())
_BY_ID = {api.id: api for api in REGISTRY}


def export_manifest() -> list[dict]:
    """Manifest records for the whole backend API surface, in registry order."""
    return [api.manifest_record() for api in REGISTRY]


def implementation(api_id: str) -> Optional[Callable]:
    api = _BY_ID.get(api_id)
    return None if api is None else api.impl
