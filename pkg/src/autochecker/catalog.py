"""API catalog: manifest ingestion, descriptive text and the two API-context DBs.

The Full-API DB holds one description/signature pair per catalogued API.
The Meta-API DB maps each meta-operation (a small, framework-neutral checking
step such as "Check whether field is static") to either the signature of the
API that implements it or a hand-written snippet.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .embedding import Embedder, Vector, similarity, vector_from_json, vector_to_json
from .errors import (
    AmbiguousKind,
    DbFormatError,
    DuplicateApi,
    EmbeddingError,
    EmptyText,
    MalformedManifest,
    MalformedSnippet,
    CatalogError,
)

NODE, EDGE, UTIL = "node", "edge", "util"
API_KINDS = (NODE, EDGE, UTIL)
SIGNATURE, SNIPPET = "signature", "snippet"
DB_FORMAT_VERSION = "1"
DEFAULT_MATCH_THRESHOLD = 0.85

# Category labels of the published meta-op set.
DEFAULT_CATEGORIES: tuple[str, ...] = (
    "Java Feature",
    "Class",
    "Method",
    "Method Call",
    "Control Stmt",
    "Field",
    "Local Var",
    "Var Usage",
    "Exception",
    "Array",
    "Object",
    "Expression",
    "Literal",
    "Multi-thread",
)

IRRELEVANT_COMMENT_WORDS = frozenset({"throws", "author", "since", "deprecated"})
BOOLEAN_TYPES = frozenset({"boolean", "bool", "java.lang.boolean"})

_REQUIRED = ("owner_type", "method_name", "return_type")


@dataclass(frozen=True)
class ApiEntry:
    id: str
    kind: str
    owner_type: str
    method_name: str
    param_types: tuple[str, ...]
    return_type: str
    returns_node: bool = False
    is_static_util: bool = False
    declared_on_abstract_node: bool = False
    comment: str = ""


@dataclass(frozen=True)
class MetaOp:
    text: str
    category: str


@dataclass
class ApiContext:
    """A retrievable unit: descriptive text plus a signature or snippet.

    ``api_kind`` and ``owner_types`` summarise the source entries so the
    retriever can filter without going back to the catalog; both are empty
    for hand-written snippets.  ``category`` is set on Meta-API entries.
    """

    description: str
    payload_kind: str
    payload: str
    vector: Vector
    source_ids: tuple[str, ...] = ()
    api_kind: Optional[str] = None
    owner_types: tuple[str, ...] = ()
    category: Optional[str] = None

    def __post_init__(self):
        if not self.description:
            raise ValueError("ApiContext description must be non-empty")
        if not self.payload:
            raise ValueError("ApiContext payload must be non-empty")
        if self.payload_kind not in (SIGNATURE, SNIPPET):
            raise ValueError(f"bad payload kind {self.payload_kind!r}")

    def to_json(self) -> dict:
        return {
            "description": self.description,
            "payload_kind": self.payload_kind,
            "payload": self.payload,
            "source_ids": list(self.source_ids),
            "api_kind": self.api_kind,
            "owner_types": list(self.owner_types),
            "category": self.category,
            "vector": vector_to_json(self.vector),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ApiContext":
        return cls(
            description=data["description"],
            payload_kind=data["payload_kind"],
            payload=data["payload"],
            vector=vector_from_json(data["vector"]),
            source_ids=tuple(data.get("source_ids", ())),
            api_kind=data.get("api_kind"),
            owner_types=tuple(data.get("owner_types", ())),
            category=data.get("category"),
        )


@dataclass
class ApiDb:
    entries: list[ApiContext]
    embedder_id: str
    db_name: str = "api"

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def dumps(self) -> str:
        header = {"db": self.db_name, "embedder_id": self.embedder_id, "format": DB_FORMAT_VERSION}
        lines = [json.dumps(header, sort_keys=True)]
        lines += [json.dumps(e.to_json(), sort_keys=True) for e in self.entries]
        return "\n".join(lines) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def loads(cls, text: str):
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise DbFormatError("empty DB file")
        try:
            header = json.loads(lines[0])
            if header.get("format") != DB_FORMAT_VERSION:
                raise DbFormatError(f"unsupported DB format {header.get('format')!r}")
            entries = [ApiContext.from_json(json.loads(ln)) for ln in lines[1:]]
        except (ValueError, KeyError, TypeError) as exc:
            raise DbFormatError(f"malformed DB: {exc}") from exc
        return cls(entries, header["embedder_id"], header.get("db", "api"))

    @classmethod
    def load(cls, path: str | Path):
        return cls.loads(Path(path).read_text(encoding="utf-8"))


class FullApiDb(ApiDb):
    def __init__(self, entries, embedder_id, db_name="full"):
        super().__init__(entries, embedder_id, db_name)


class MetaApiDb(ApiDb):
    def __init__(self, entries, embedder_id, db_name="meta"):
        super().__init__(entries, embedder_id, db_name)


# -- classification & descriptive text --------------------------------------------


def classify_api(
    declared_on_abstract_node: bool, returns_node: bool, is_static_util: bool, api_id: str = ""
) -> str:
    """Edge if declared on the abstract node and returning nodes, util if a
    static utility, node otherwise."""
    if declared_on_abstract_node and is_static_util:
        raise AmbiguousKind(api_id)
    if declared_on_abstract_node and returns_node:
        return EDGE
    if is_static_util:
        return UTIL
    return NODE


_CAMEL_WORD = re.compile(r"[A-Z]+[0-9]*(?=[A-Z][a-z])|[A-Z]?[a-z]+[0-9]*|[A-Z]+[0-9]*|[0-9]+")


def camel_words(name: str) -> list[str]:
    words = []
    for chunk in re.split(r"[^A-Za-z0-9]+", name):
        for word in _CAMEL_WORD.findall(chunk):
            if word.isdigit() and words:
                words[-1] += word
            else:
                words.append(word)
    return [w for w in words if w != "AST"]


def split_camel(name: str) -> str:
    """``"ASTStringLiteral"`` -> ``"string literal"``, ``"isEmpty"`` -> ``"is empty"``."""
    return " ".join(w.lower() for w in camel_words(name))


def relevant_comment(comment: str) -> str:
    comment = " ".join(comment.split())
    m = re.match(r"@?([A-Za-z]+)", comment)
    if m and m.group(1).lower() in IRRELEVANT_COMMENT_WORDS:
        return ""
    return comment


def _is_boolean(type_name: str) -> bool:
    return type_name.strip().lower() in BOOLEAN_TYPES


def gen_description(entry: ApiEntry) -> str:
    method = split_camel(entry.method_name)
    owner = split_camel(entry.owner_type)
    boolean = _is_boolean(entry.return_type)
    if entry.kind == UTIL:
        text = f"Check whether {method}" if boolean else method
    else:
        text = f"Check whether {owner} {method}" if boolean else f"{method} of {owner}"
    comment = relevant_comment(entry.comment)
    if comment:
        text += " //" + comment
    return text


def render_signature(entry: ApiEntry) -> str:
    sig = f"{entry.owner_type}: {entry.return_type} {entry.method_name}({', '.join(entry.param_types)})"
    comment = relevant_comment(entry.comment)
    if comment:
        sig += " //" + comment
    return sig


# -- ingestion ------------------------------------------------------------------------


def ingest_manifest(records: Iterable[dict]) -> list[ApiEntry]:
    catalog: list[ApiEntry] = []
    seen: set[str] = set()
    for index, rec in enumerate(records):
        if not isinstance(rec, dict):
            raise MalformedManifest(index, "record is not an object")
        for key in _REQUIRED:
            if not rec.get(key):
                raise MalformedManifest(index, f"missing field {key!r}")
        api_id = rec.get("id") or f"{rec['owner_type']}#{rec['method_name']}"
        if api_id in seen:
            raise DuplicateApi(api_id)
        seen.add(api_id)
        flags = {
            key: bool(rec.get(key, False))
            for key in ("returns_node", "is_static_util", "declared_on_abstract_node")
        }
        kind = classify_api(api_id=api_id, **flags)
        params = rec.get("param_types") or []
        if not isinstance(params, list):
            raise MalformedManifest(index, "param_types must be a list")
        catalog.append(
            ApiEntry(
                id=api_id,
                kind=kind,
                owner_type=rec["owner_type"],
                method_name=rec["method_name"],
                param_types=tuple(params),
                return_type=rec["return_type"],
                comment=rec.get("comment") or "",
                **flags,
            )
        )
    return catalog


def read_jsonl(path: str | Path) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                records.append(json.loads(line))
            except ValueError as exc:
                raise MalformedManifest(lineno - 1, f"invalid JSON: {exc}") from exc
    return records


def write_jsonl(path: str | Path, records: Iterable[dict]) -> None:
    text = "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)
    Path(path).write_text(text, encoding="utf-8")


def load_metaops(records: Iterable[dict], categories: Iterable[str] = DEFAULT_CATEGORIES) -> list[MetaOp]:
    allowed = set(categories)
    ops = []
    for index, rec in enumerate(records):
        text = (rec.get("text") or "").strip()
        category = rec.get("category") or ""
        if not text:
            raise CatalogError(f"meta-op {index}: empty text")
        if category not in allowed:
            raise CatalogError(f"meta-op {index}: unknown category {category!r}")
        ops.append(MetaOp(text, category))
    return ops


def load_snippets(records: Iterable[dict]) -> dict[str, str]:
    return {rec["meta_op_text"]: rec.get("snippet", "") for rec in records}


# -- DB construction --------------------------------------------------------------


def _embed(embedder: Embedder, text: str, api_id: str) -> Vector:
    try:
        return embedder.embed(text)
    except EmbeddingError as exc:
        raise EmbeddingError(str(exc), api_id) from exc
    except EmptyText as exc:
        raise EmbeddingError(str(exc), api_id) from exc


def build_full_db(catalog: list[ApiEntry], embedder: Embedder) -> FullApiDb:
    if not catalog:
        raise CatalogError("cannot build a Full-API DB from an empty catalog")
    entries = []
    for entry in catalog:
        description = gen_description(entry)
        entries.append(
            ApiContext(
                description=description,
                payload_kind=SIGNATURE,
                payload=render_signature(entry),
                vector=_embed(embedder, description, entry.id),
                source_ids=(entry.id,),
                api_kind=entry.kind,
                owner_types=(entry.owner_type,),
            )
        )
    return FullApiDb(entries, embedder.embedder_id)


def best_match(query: Vector, db: Iterable[ApiContext]) -> tuple[int, Optional[float]]:
    """Index and score of the most similar entry; ties go to the lowest index."""
    best_index, best_score = -1, None
    for index, ctx in enumerate(db):
        score = similarity(query, ctx.vector)
        if best_score is None or score > best_score:
            best_index, best_score = index, score
    return best_index, best_score


def build_meta_db(
    metaops: list[MetaOp],
    full_db: FullApiDb,
    snippets: dict[str, str],
    embedder: Embedder,
    match_threshold: float = DEFAULT_MATCH_THRESHOLD,
) -> tuple[MetaApiDb, list[MetaOp]]:
    """Pair every meta-op with an API signature or a snippet.

    Meta-ops that neither match an API description at ``match_threshold`` nor
    have a snippet are returned as unresolved; someone has to write the
    snippet by hand.
    """
    if not metaops:
        raise CatalogError("no meta-ops given")
    if not 0 < match_threshold <= 1:
        raise ValueError("match_threshold must be in (0, 1]")
    entries: list[ApiContext] = []
    unresolved: list[MetaOp] = []
    for op in metaops:
        vec = _embed(embedder, op.text, op.text)
        index, score = best_match(vec, full_db.entries)
        if score is not None and score >= match_threshold:
            hit = full_db.entries[index]
            entries.append(
                ApiContext(
                    description=op.text,
                    payload_kind=SIGNATURE,
                    payload=hit.payload,
                    vector=vec,
                    source_ids=hit.source_ids,
                    api_kind=hit.api_kind,
                    owner_types=hit.owner_types,
                    category=op.category,
                )
            )
        elif op.text in snippets:
            snippet = snippets[op.text]
            if not snippet or not snippet.strip():
                raise MalformedSnippet(op.text)
            entries.append(
                ApiContext(
                    description=op.text,
                    payload_kind=SNIPPET,
                    payload=snippet,
                    vector=vec,
                    category=op.category,
                )
            )
        else:
            unresolved.append(op)
    return MetaApiDb(entries, embedder.embedder_id), unresolved
