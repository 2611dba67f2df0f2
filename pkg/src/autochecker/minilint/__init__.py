"""Reference lint backend: checker DSL compiler, interpreter and API surface."""

from __future__ import annotations

from dataclasses import dataclass

from ..catalog import ApiEntry, ingest_manifest
from ..minisrc.nodes import AstNode
from .apis import EDGE_API_NAMES, export_manifest
from .compiler import CompiledChecker, compile_checker
from .header import default_template, load_template, normalize_header
from .interpreter import Violation, run_checker


@dataclass(frozen=True)
class CheckerArtifact:
    """A checker script plus where in a development run it came from."""

    source: str
    round: int = 0
    attempt: int = 0

    def __post_init__(self):
        if not self.source.strip():
            raise ValueError("checker source must be non-empty")


class MiniLint:
    """The backend bundle the engine and harness talk to."""

    def __init__(self, catalog: list[ApiEntry] | None = None):
        self.catalog = catalog if catalog is not None else ingest_manifest(export_manifest())

    def compile(self, source: str) -> CompiledChecker:
        return compile_checker(source, self.catalog)

    def run(self, compiled: CompiledChecker, ast: AstNode) -> list[Violation]:
        return run_checker(compiled, ast)


__all__ = [
    "CheckerArtifact",
    "EDGE_API_NAMES",
    "CompiledChecker",
    "MiniLint",
    "Violation",
    "compile_checker",
    "default_template",
    "export_manifest",
    "load_template",
    "normalize_header",
    "run_checker",
]
