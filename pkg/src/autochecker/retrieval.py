"""Logic-guided API-context retrieval.

The rule is decomposed by the LLM into small sub-operations.  Each one is
looked up first in the Meta-API DB and, failing that, in the Full-API DB.
Node APIs of types that do not occur in the test's AST are dropped from both.  All edge
(traversal) contexts are always included.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional

from .catalog import EDGE, NODE, ApiContext, ApiDb, FullApiDb, MetaApiDb, MetaOp, best_match
from .embedding import Embedder, LexicalEmbedder
from .errors import DecompositionError, EmptyText, LlmError
from .minisrc.nodes import AstNode, node_types_present

if TYPE_CHECKING:
    from .harness import CheckerRule, TestCase
    from .llm import LlmClient

META, FULL, NONE = "meta", "full", "none"

_BULLET = re.compile(r"^\s*(?:\d+\s*[.):]|[-*•])\s+")


@dataclass(frozen=True)
class SubOperation:
    text: str
    index: int

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("sub-operation text must be non-empty")


@dataclass(frozen=True)
class RetrievalConfig:
    meta_threshold: float = 0.85
    full_threshold: float = 0.80

    def __post_init__(self):
        for name in ("meta_threshold", "full_threshold"):
            value = getattr(self, name)
            if not 0 < value <= 1:
                raise ValueError(f"{name} must be in (0, 1], got {value}")


@dataclass
class SubOpHit:
    subop: SubOperation
    hit: str
    score: Optional[float] = None
    context: Optional[ApiContext] = None

    def to_json(self) -> dict:
        return {
            "index": self.subop.index,
            "subop": self.subop.text,
            "hit": self.hit,
            "score": self.score,
            "description": None if self.context is None else self.context.description,
            "payload": None if self.context is None else self.context.payload,
        }


@dataclass
class RetrievalResult:
    contexts: list[ApiContext]
    per_subop: list[SubOpHit] = field(default_factory=list)
    decomposition_failed: bool = False

    @property
    def subops(self) -> list[SubOperation]:
        return [h.subop for h in self.per_subop]

    def to_json(self) -> dict:
        return {
            "decomposition_failed": self.decomposition_failed,
            "per_subop": [h.to_json() for h in self.per_subop],
            "contexts": [
                {"description": c.description, "payload_kind": c.payload_kind, "payload": c.payload}
                for c in self.contexts
            ],
        }


# -- decomposition ----------------------------------------------------------------


def build_decompose_prompt(rule: "CheckerRule", test: "TestCase", metaops: list[MetaOp]) -> str:
    refs = "\n".join(f"- {op.text}" for op in metaops)
    return (
        "Decompose the checking logic of the rule below into a numbered list of small,\n"
        "concrete sub-operations. Use the same granularity as the reference operations.\n"
        "Answer with the list only.\n"
        "\n"
        "### RULE DESCRIPTION\n"
        f"{rule.description}\n"
        "\n"
        "### TEST CASE CODE\n"
        f"{test.source.rstrip()}\n"
        "\n"
        "### REFERENCE OPERATIONS\n"
        f"{refs}\n"
    )


def parse_subops(response: str) -> list[SubOperation]:
    """Bulleted or numbered list -> sub-operations.

    When any line carries a bullet, unbulleted lines are taken to be chatter
    and dropped.
    """
    lines = [ln for ln in (response or "").splitlines() if ln.strip() and not ln.strip().startswith("```")]
    if any(_BULLET.match(ln) for ln in lines):
        lines = [ln for ln in lines if _BULLET.match(ln)]
    texts = [_BULLET.sub("", ln).strip() for ln in lines]
    texts = [t for t in texts if t]
    if not texts:
        raise DecompositionError("no sub-operations in LLM response")
    return [SubOperation(text, i) for i, text in enumerate(texts)]


def decompose_rule(
    rule: "CheckerRule", test: "TestCase", metaops: list[MetaOp], llm: "LlmClient"
) -> list[SubOperation]:
    if not rule.description.strip():
        raise DecompositionError("rule description is empty")
    return parse_subops(llm.generate(build_decompose_prompt(rule, test, metaops), "decompose"))


# -- lookup -----------------------------------------------------------------------------


def filter_node_apis(db: ApiDb, ast_node_types: set[str]) -> ApiDb:
    """Drop node APIs declared only on node types absent from the test's AST.

    Works on either DB; meta entries backed by a node API are filtered the
    same way, snippets (no api_kind) always survive.
    """
    kept = [
        ctx
        for ctx in db.entries
        if ctx.api_kind != NODE or any(owner in ast_node_types for owner in ctx.owner_types)
    ]
    return type(db)(kept, db.embedder_id)


def edge_contexts(full_db: FullApiDb) -> list[ApiContext]:
    return [ctx for ctx in full_db.entries if ctx.api_kind == EDGE]


def retrieve_for_subop(
    subop: SubOperation,
    meta_db: MetaApiDb,
    filtered_full_db: FullApiDb,
    config: RetrievalConfig,
    embedder: Embedder,
) -> tuple[str, Optional[ApiContext], Optional[float]]:
    try:
        query = embedder.embed(subop.text)
    except EmptyText:
        return NONE, None, None
    index, score = best_match(query, meta_db.entries)
    if score is not None and score >= config.meta_threshold:
        return META, meta_db.entries[index], score
    index, score = best_match(query, filtered_full_db.entries)
    if score is not None and score >= config.full_threshold:
        return FULL, filtered_full_db.entries[index], score
    return NONE, None, None


def assemble(full_db: FullApiDb, hits: list[SubOpHit]) -> list[ApiContext]:
    contexts, seen = [], set()
    for ctx in edge_contexts(full_db) + [h.context for h in hits if h.context is not None]:
        if ctx.payload not in seen:
            seen.add(ctx.payload)
            contexts.append(ctx)
    return contexts


@dataclass
class Retriever:
    """Everything retrieval needs, bundled for the engine."""

    full_db: FullApiDb
    meta_db: MetaApiDb
    metaops: list[MetaOp]
    llm: "LlmClient"
    embedder: Embedder = field(default_factory=LexicalEmbedder)
    config: RetrievalConfig = field(default_factory=RetrievalConfig)

    def __post_init__(self):
        for db in (self.full_db, self.meta_db):
            if db.embedder_id != self.embedder.embedder_id:
                raise ValueError(
                    f"DB built with {db.embedder_id!r} but retrieval embedder is "
                    f"{self.embedder.embedder_id!r}"
                )

    def decompose(self, rule: "CheckerRule", test: "TestCase") -> list[SubOperation]:
        """Ask for a decomposition, re-asking once before giving up."""
        try:
            return decompose_rule(rule, test, self.metaops, self.llm)
        except (DecompositionError, LlmError):
            pass
        try:
            return decompose_rule(rule, test, self.metaops, self.llm)
        except LlmError as exc:
            raise DecompositionError(f"decomposition failed twice: {exc}") from exc

    def fallback(self) -> RetrievalResult:
        """Edge contexts only; used when decomposition could not be obtained."""
        return RetrievalResult(edge_contexts(self.full_db), [], decomposition_failed=True)

    def retrieve(self, rule: "CheckerRule", test: "TestCase", ast: AstNode) -> RetrievalResult:
        subops = self.decompose(rule, test)
        present = node_types_present(ast)
        meta = filter_node_apis(self.meta_db, present)
        filtered = filter_node_apis(self.full_db, present)
        hits = []
        for subop in subops:
            hit, ctx, score = retrieve_for_subop(subop, meta, filtered, self.config, self.embedder)
            hits.append(SubOpHit(subop, hit, score, ctx))
        return RetrievalResult(assemble(self.full_db, hits), hits)


def retrieve_contexts(
    rule: "CheckerRule",
    test: "TestCase",
    ast: AstNode,
    deps: Retriever,
    config: Optional[RetrievalConfig] = None,
) -> RetrievalResult:
    if config is not None and config != deps.config:
        deps = Retriever(deps.full_db, deps.meta_db, deps.metaops, deps.llm, deps.embedder, config)
    return deps.retrieve(rule, test, ast)
