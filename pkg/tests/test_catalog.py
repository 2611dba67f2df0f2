import json

import pytest
from hypothesis import given, strategies as st

from autochecker.catalog import (
    EDGE,
    NODE,
    SIGNATURE,
    SNIPPET,
    UTIL,
    ApiEntry,
    FullApiDb,
    MetaApiDb,
    MetaOp,
    build_full_db,
    build_meta_db,
    classify_api,
    gen_description,
    ingest_manifest,
    load_metaops,
    read_jsonl,
    relevant_comment,
    render_signature,
    split_camel,
)
from autochecker.embedding import LexicalEmbedder
from autochecker.errors import (
    AmbiguousKind,
    CatalogError,
    DbFormatError,
    DuplicateApi,
    MalformedManifest,
    MalformedSnippet,
)
from autochecker.minilint import export_manifest

from scenarios import DATA, AliasEmbedder


def entry(owner, method, ret, kind=NODE, params=(), comment=""):
    return ApiEntry(f"{owner}#{method}", kind, owner, method, tuple(params), ret, comment=comment)


# -- classification ------------------------------------------------------------------


@pytest.mark.parametrize(
    "abstract, returns_node, util, kind",
    [
        (True, True, False, EDGE),
        (False, False, True, UTIL),
        (False, False, False, NODE),
        (True, False, False, NODE),
        (False, True, False, NODE),
    ],
)
def test_classify_api(abstract, returns_node, util, kind):
    assert classify_api(abstract, returns_node, util) == kind


def test_classify_ambiguous():
    with pytest.raises(AmbiguousKind):
        classify_api(True, True, True, "Node#weird")


def test_ingest_examples():
    cat = ingest_manifest(
        [
            {"owner_type": "Node", "method_name": "getParent", "return_type": "StmtNode",
             "returns_node": True, "declared_on_abstract_node": True},
            {"owner_type": "UtilNs", "method_name": "isNullLiteral", "return_type": "boolean",
             "param_types": ["Node"], "is_static_util": True},
            {"owner_type": "FieldDecl", "method_name": "isStatic", "return_type": "boolean"},
        ]
    )
    assert [e.kind for e in cat] == [EDGE, UTIL, NODE]
    assert cat[0].id == "Node#getParent"


def test_ingest_errors():
    with pytest.raises(DuplicateApi):
        ingest_manifest([{"owner_type": "A", "method_name": "m", "return_type": "int"}] * 2)
    with pytest.raises(MalformedManifest) as info:
        ingest_manifest([{"owner_type": "A", "method_name": "m", "return_type": "int"}, {"owner_type": "A"}])
    assert info.value.index == 1


# -- descriptions ------------------------------------------------------------------


@pytest.mark.parametrize(
    "name, phrase",
    [
        ("ASTStringLiteral", "string literal"),
        ("isEmpty", "is empty"),
        ("getSimpleName", "get simple name"),
        ("getChild2Node", "get child2 node"),
        ("ASTClassOrInterfaceDeclaration", "class or interface declaration"),
        ("parseXMLDocument", "parse xml document"),
    ],
)
def test_split_camel(name, phrase):
    assert split_camel(name) == phrase


def test_string_literal_description_and_signature():
    e = entry("ASTStringLiteral", "isEmpty", "boolean", comment="True if the constant value is empty.")
    assert gen_description(e) == "Check whether string literal is empty //True if the constant value is empty."
    assert render_signature(e) == "ASTStringLiteral: boolean isEmpty() //True if the constant value is empty."


def test_description_templates():
    assert gen_description(entry("ClassDecl", "getSimpleName", "String")) == "get simple name of class decl"
    assert gen_description(entry("AstUtil", "isNullLiteral", "boolean", UTIL, ["Node"])) == "Check whether is null literal"
    assert gen_description(entry("AstUtil", "getEnclosingClassName", "String", UTIL)) == "get enclosing class name"
    assert gen_description(entry("Node", "getParent", "Node", EDGE)) == "get parent of node"


@pytest.mark.parametrize(
    "comment, kept",
    [
        ("@throws IndexError when out of range", ""),
        ("Throws if closed", ""),
        ("Author: backend team", ""),
        ("@since 1.2", ""),
        ("DEPRECATED use getName", ""),
        ("Nearest first.", "Nearest first."),
        ("  spaced   out ", "spaced out"),
    ],
)
def test_irrelevant_comment_filter(comment, kept):
    assert relevant_comment(comment) == kept


# -- DBs ------------------------------------------------------------------------------


def test_full_db_from_reference_manifest():
    catalog = ingest_manifest(export_manifest())
    db = build_full_db(catalog, LexicalEmbedder())
    assert len(db.entries) == len(catalog)
    for ctx, e in zip(db.entries, catalog):
        assert ctx.payload_kind == SIGNATURE
        assert ctx.source_ids == (e.id,)
        assert ctx.description == gen_description(e)
        assert ctx.payload == render_signature(e)
        assert abs(ctx.vector.norm() - 1) < 1e-9


def test_full_db_rebuild_is_byte_identical():
    catalog = ingest_manifest(export_manifest())
    a = build_full_db(catalog, LexicalEmbedder()).dumps()
    b = build_full_db(ingest_manifest(export_manifest()), LexicalEmbedder()).dumps()
    assert a == b


def test_db_round_trip(tmp_path):
    db = build_full_db(ingest_manifest(export_manifest()), LexicalEmbedder())
    db.save(tmp_path / "full.jsonl")
    again = FullApiDb.load(tmp_path / "full.jsonl")
    assert again.dumps() == db.dumps()
    header = json.loads((tmp_path / "full.jsonl").read_text().splitlines()[0])
    assert header == {"db": "full", "embedder_id": "lexical-tf-v1", "format": "1"}


def test_db_bad_header():
    with pytest.raises(DbFormatError):
        FullApiDb.loads('{"db": "full", "embedder_id": "x", "format": "9"}\n')
    with pytest.raises(DbFormatError):
        FullApiDb.loads("")


def test_meta_pairings_with_synonym_embedder():
    full_entry = entry("ASTClassOrInterfaceDeclaration", "getSimpleName", "java.lang.String")
    desc = gen_description(full_entry)
    assert desc == "get simple name of class or interface declaration"
    embedder = AliasEmbedder({"Get the name of class": desc})
    full = build_full_db([full_entry], embedder)
    snippet = 'if (method.getReturnTypeName() == "int") { ... }'
    ops = [MetaOp("Get the name of class", "Class"), MetaOp("Check whether the return type of method is int", "Method")]
    meta, unresolved = build_meta_db(ops, full, {ops[1].text: snippet}, embedder)
    assert unresolved == []
    sig, snip = meta.entries
    assert (sig.description, sig.category, sig.payload_kind) == ("Get the name of class", "Class", SIGNATURE)
    assert sig.payload == "ASTClassOrInterfaceDeclaration: java.lang.String getSimpleName()"
    assert sig.source_ids == (full_entry.id,)
    assert (snip.description, snip.category, snip.payload_kind, snip.payload) == (
        "Check whether the return type of method is int", "Method", SNIPPET, snippet,
    )
    assert snip.source_ids == ()


def test_meta_db_unresolved_and_bad_snippet():
    embedder = LexicalEmbedder()
    full = build_full_db(ingest_manifest(export_manifest()), embedder)
    ops = [MetaOp("Check whether field is static", "Field"), MetaOp("Count the lambdas in a stream", "Java Feature")]
    meta, unresolved = build_meta_db(ops, full, {}, embedder)
    assert [c.payload for c in meta.entries] == ["FieldDecl: boolean isStatic()"]
    assert unresolved == [ops[1]]
    with pytest.raises(MalformedSnippet):
        build_meta_db(ops, full, {ops[1].text: "   "}, embedder)
    with pytest.raises(CatalogError):
        build_meta_db([], full, {}, embedder)


def test_metaop_categories_checked():
    with pytest.raises(CatalogError):
        load_metaops([{"text": "Do a thing", "category": "Nonsense"}])
    with pytest.raises(CatalogError):
        load_metaops([{"text": " ", "category": "Class"}])


def test_shipped_meta_db_resolves_everything():
    embedder = LexicalEmbedder()
    full = build_full_db(ingest_manifest(read_jsonl(DATA / "reference_manifest.jsonl")), embedder)
    ops = load_metaops(read_jsonl(DATA / "metaops.jsonl"))
    snippets = {r["meta_op_text"]: r["snippet"] for r in read_jsonl(DATA / "snippets.jsonl")}
    meta, unresolved = build_meta_db(ops, full, snippets, embedder)
    assert unresolved == []
    assert len(meta.entries) + len(unresolved) == len(ops)
    assert isinstance(meta, MetaApiDb)


# -- properties over random entries ------------------------------------------------------

ident = st.from_regex(r"(AST)?[A-Z][a-z]{1,6}([A-Z][a-z]{1,6}){0,2}", fullmatch=True)
method = st.from_regex(r"(is|get|has)[A-Z][a-z]{1,6}", fullmatch=True)


@given(ident, method, st.sampled_from(["boolean", "Boolean", "int", "String", "Node"]),
       st.sampled_from([NODE, EDGE, UTIL]))
def test_description_properties(owner, meth, ret, kind):
    desc = gen_description(entry(owner, meth, ret, kind))
    if ret.lower() == "boolean":
        assert desc.startswith("Check whether")
    assert "AST" not in desc
