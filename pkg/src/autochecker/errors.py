"""Exception hierarchy shared across the package."""

from __future__ import annotations


class AutoCheckerError(Exception):
    """Base class for every error raised by this package."""


# -- catalog ---------------------------------------------------------------


class CatalogError(AutoCheckerError):
    pass


class DuplicateApi(CatalogError):
    def __init__(self, api_id: str):
        super().__init__(f"duplicate API id {api_id!r}")
        self.api_id = api_id


class MalformedManifest(CatalogError):
    def __init__(self, index: int, message: str):
        super().__init__(f"manifest record {index}: {message}")
        self.index = index


class AmbiguousKind(CatalogError):
    def __init__(self, api_id: str = ""):
        super().__init__(
            f"API {api_id!r} is both declared on the abstract node and a static utility"
        )
        self.api_id = api_id


class MalformedSnippet(CatalogError):
    def __init__(self, meta_op: str):
        super().__init__(f"empty snippet for meta-op {meta_op!r}")
        self.meta_op = meta_op


class DbFormatError(CatalogError):
    pass


# -- embedding / retrieval --------------------------------------------------


class EmptyText(AutoCheckerError):
    pass


class EmbeddingError(AutoCheckerError):
    def __init__(self, message: str, api_id: str | None = None):
        super().__init__(message if api_id is None else f"{api_id}: {message}")
        self.api_id = api_id


class DimensionError(AutoCheckerError):
    pass


class DecompositionError(AutoCheckerError):
    pass


# -- source parsing -------------------------------------------------------------


class ParseError(AutoCheckerError):
    def __init__(self, message: str, line: int = 1, col: int = 1):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


# -- checker backend ------------------------------------------------------------


class CompileError(AutoCheckerError):
    """Checker failed static resolution against the API catalog.

    ``unknown_names`` holds ``(identifier, line)`` pairs for names that exist
    nowhere in the catalog; ``type_errors`` holds ``(message, line)`` pairs.
    """

    def __init__(self, unknown_names=(), type_errors=()):
        self.unknown_names: list[tuple[str, int]] = list(unknown_names)
        self.type_errors: list[tuple[str, int]] = list(type_errors)
        if not self.unknown_names and not self.type_errors:
            raise ValueError("CompileError needs at least one entry")
        super().__init__(self.summary())

    def summary(self) -> str:
        parts = [f"line {line}: unknown name {name!r}" for name, line in self.unknown_names]
        parts += [f"line {line}: {msg}" for msg, line in self.type_errors]
        return "; ".join(parts)


class CheckerRuntimeError(AutoCheckerError):
    def __init__(self, message: str, line: int, call: str | None = None):
        where = f" in call {call}" if call else ""
        super().__init__(f"line {line}{where}: {message}")
        self.line = line
        self.call = call


class NormalizationError(AutoCheckerError):
    pass


# -- engine / harness -----------------------------------------------------------


class LlmError(AutoCheckerError):
    pass


class TranscriptError(AutoCheckerError):
    pass


class EmptySuite(AutoCheckerError):
    pass


class SuiteFormatError(AutoCheckerError):
    pass


class ConfigError(AutoCheckerError):
    pass
