import pytest
from hypothesis import given, settings, strategies as st

from autochecker.errors import ParseError
from autochecker.minisrc import NODE_TYPES, AstNode, node_types_present, parse_source, render_ast, structural_hash


def test_static_field_hand_parse():
    cu = parse_source("class A { static int x; }")
    assert cu.node_type == "CompilationUnit" and cu.parent is None
    (cls,) = cu.children
    assert (cls.node_type, cls.name) == ("ClassDecl", "A")
    (field,) = cls.children
    assert (field.node_type, field.name, field.type_name) == ("FieldDecl", "x", "int")
    assert field.modifiers == frozenset({"static"})
    assert field.span == (1, 11, 1, 23)


@pytest.mark.parametrize(
    "src, line, col",
    [
        ("class A {", 1, 10),
        ("class A {\n  int x = ;\n}", 2, 11),
        ("class 1A {}", 1, 7),
    ],
)
def test_parse_error_positions(src, line, col):
    with pytest.raises(ParseError) as info:
        parse_source(src)
    assert (info.value.line, info.value.col) == (line, col)


@pytest.mark.parametrize("src", ["", "   \n", "// only a comment\n"])
def test_empty_compilation_unit(src):
    with pytest.raises(ParseError, match="empty compilation unit"):
        parse_source(src)


def test_render_examples():
    cu = parse_source("class A { }")
    assert render_ast(cu) == "CompilationUnit\n  ClassDecl(A)\n"
    cu = parse_source("class S { int length() { return 1; } }")
    lines = render_ast(cu).splitlines()
    assert "    MethodDecl(length)" in lines
    assert "    MethodDecl" in render_ast(cu, augment=False).splitlines()


def test_node_types_present_examples():
    assert node_types_present(parse_source("class A { }")) == {"CompilationUnit", "ClassDecl"}
    assert "FieldDecl" in node_types_present(parse_source("class A { int f; }"))


def test_expression_shapes():
    cu = parse_source("class A { A() { x = y = 0; a.b(1, \"s\"); z = !p || q && r == s < t + u * v; } }")
    block = cu.children[0].children[0].child_with_role("body")
    chain = block.children[0].children[0]
    assert chain.node_type == "AssignExpr"
    assert chain.child_with_role("value").node_type == "AssignExpr"  # right associative
    call = block.children[1].children[0]
    assert (call.node_type, call.name) == ("CallExpr", "b")
    assert [c.role for c in call.children] == ["qualifier", "arg", "arg"]
    top = block.children[2].children[0].child_with_role("value")
    assert (top.node_type, top.op) == ("BinaryExpr", "||")
    assert top.child_with_role("left").node_type == "UnaryExpr"
    assert top.child_with_role("right").op == "&&"


@pytest.mark.parametrize("image, value, octal", [("0", 0, False), ("010", 8, True), ("0755", 493, True), ("42", 42, False)])
def test_int_literals(image, value, octal):
    cu = parse_source(f"class A {{ int v = {image}; }}")
    lit = next(n for n in cu.walk() if n.node_type == "IntLit")
    assert (lit.value, lit.image, lit.octal) == (value, image, octal)


def test_string_literal_unescaped():
    cu = parse_source('class A { String s = "a\\"b"; }')
    lit = next(n for n in cu.walk() if n.node_type == "StringLit")
    assert lit.value == 'a"b'


def test_crlf_accepted():
    cu = parse_source("class A {\r\n  int x;\r\n}\r\n")
    assert cu.children[0].children[0].line == 2


def test_bad_node_type_rejected():
    with pytest.raises(ValueError):
        AstNode("Lambda", (1, 1, 1, 1))


# -- generated programs --------------------------------------------------------------

names = st.sampled_from(["a", "b", "count", "x1", "this"])
atoms = st.one_of(names, st.integers(0, 999).map(str), st.just("null"), st.just('"s"'), st.just("010"))


def _exprs():
    return st.recursive(
        atoms,
        lambda inner: st.one_of(
            st.tuples(inner, st.sampled_from(["+", "-", "*", "<", "==", "!=", "&&", "||"]), inner).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
            inner.map(lambda e: f"!{e}"),
            st.tuples(names, st.lists(inner, max_size=2)).map(lambda t: f"{t[0]}.m({', '.join(t[1])})"),
            st.lists(inner, max_size=2).map(lambda a: f"new T({', '.join(a)})"),
        ),
        max_leaves=6,
    )


exprs = _exprs()
simple_stmts = st.one_of(
    st.tuples(st.sampled_from(["a", "b", "obj.f"]), exprs).map(lambda t: f"{t[0]} = {t[1]};"),
    exprs.map(lambda e: f"int v = {e};"),
    exprs.map(lambda e: f"return {e};"),
    st.just("return;"),
)
stmts = st.recursive(
    simple_stmts,
    lambda inner: st.one_of(
        st.tuples(exprs, st.lists(inner, max_size=2)).map(lambda t: f"if ({t[0]}) {{ {' '.join(t[1])} }}"),
        st.tuples(exprs, st.lists(inner, max_size=2)).map(lambda t: f"while ({t[0]}) {{ {' '.join(t[1])} }}"),
        st.lists(inner, max_size=2).map(lambda b: f"try {{ {' '.join(b)} }} catch (E e) {{ }}"),
    ),
    max_leaves=5,
)
members = st.one_of(
    st.tuples(st.sampled_from(["", "static ", "private final "]), st.sampled_from(["f", "g"])).map(lambda t: f"{t[0]}int {t[1]};"),
    st.lists(stmts, max_size=3).map(lambda b: "void m(int p) {\n" + "\n".join(b) + "\n}"),
    st.lists(stmts, max_size=2).map(lambda b: "C() {\n" + "\n".join(b) + "\n}"),
)
programs = st.lists(members, max_size=4).map(lambda ms: "class C {\n" + "\n".join(ms) + "\n}\n")


def _second_traversal(node, acc):
    acc.add(node.node_type)
    stack = list(node.children)
    while stack:
        n = stack.pop()
        acc.add(n.node_type)
        stack.extend(n.children)
    return acc


@settings(max_examples=150, deadline=None)
@given(programs)
def test_generated_programs_tree_invariants(src):
    cu = parse_source(src)
    assert cu.node_type == "CompilationUnit" and cu.parent is None
    for node in cu.walk():
        assert node.node_type in NODE_TYPES
        for child in node.children:
            assert child.parent is node
            # spans nest within the parent
            assert (node.span[0], node.span[1]) <= (child.span[0], child.span[1])
            assert (child.span[2], child.span[3]) <= (node.span[2], node.span[3])
        for left, right in zip(node.children, node.children[1:]):
            assert (left.span[2], left.span[3]) < (right.span[0], right.span[1])
    assert node_types_present(cu) == _second_traversal(cu, set())
    assert structural_hash(parse_source(src)) == structural_hash(cu)
    assert render_ast(parse_source(src)) == render_ast(cu)
