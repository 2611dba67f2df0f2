"""Test-driven generation of AST-based lint checkers.

An LLM writes a checker for a rule, guided by the rule's test suite one test
at a time, with API knowledge pulled from two retrieval databases.  The
package ships its own small source language (:mod:`autochecker.minisrc`) and
checker backend (:mod:`autochecker.minilint`) so everything runs offline.
"""

from .catalog import ApiContext, ApiEntry, FullApiDb, MetaApiDb, MetaOp, build_full_db, build_meta_db
from .embedding import LexicalEmbedder, similarity
from .harness import CheckerRule, TestCase, TestSuite, ValidationReport, compute_metrics, load_suite, validate_checker
from .llm import HttpLlm, ScriptedLlm
from .minilint import CheckerArtifact, MiniLint, compile_checker, normalize_header, run_checker
from .minisrc import parse_source
from .retrieval import RetrievalConfig, Retriever, retrieve_contexts
from .tdcd import TdcdConfig, TdcdDeps, TdcdOutcome, run_tdcd

__version__ = "0.1.0"

__all__ = [
    "ApiContext",
    "ApiEntry",
    "CheckerArtifact",
    "CheckerRule",
    "FullApiDb",
    "HttpLlm",
    "LexicalEmbedder",
    "MetaApiDb",
    "MetaOp",
    "MiniLint",
    "RetrievalConfig",
    "Retriever",
    "ScriptedLlm",
    "TdcdConfig",
    "TdcdDeps",
    "TdcdOutcome",
    "TestCase",
    "TestSuite",
    "ValidationReport",
    "build_full_db",
    "build_meta_db",
    "compile_checker",
    "compute_metrics",
    "load_suite",
    "normalize_header",
    "parse_source",
    "retrieve_contexts",
    "run_checker",
    "run_tdcd",
    "similarity",
    "validate_checker",
]
