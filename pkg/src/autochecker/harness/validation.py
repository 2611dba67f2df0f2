"""Validate a checker against a full test suite."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..errors import CheckerRuntimeError, CompileError
from .suite import TestSuite


@dataclass(frozen=True)
class TestResult:
    found_lines: tuple[int, ...]
    expected_lines: tuple[int, ...]
    passed: bool
    error: Optional[str] = None

    __test__ = False

    def to_json(self) -> dict:
        return {
            "found": list(self.found_lines),
            "expected_count": len(self.expected_lines),
            "expected_lines": list(self.expected_lines),
            "verdict": "pass" if self.passed else "fail",
            "error": self.error,
        }


@dataclass
class ValidationReport:
    compile_ok: bool
    passed: list[str]
    failed: list[str]
    per_test: dict[str, TestResult] = field(default_factory=dict)
    compile_error: Optional[str] = None

    @property
    def total(self) -> int:
        return len(self.passed) + len(self.failed)

    @property
    def pr(self) -> Fraction:
        return Fraction(len(self.passed), self.total) if self.total else Fraction(0)

    def to_json(self) -> dict:
        return {
            "compile_ok": self.compile_ok,
            "compile_error": self.compile_error,
            "passed": list(self.passed),
            "failed": list(self.failed),
            "pr": str(self.pr),
            "pr_float": float(self.pr),
            "per_test": {k: v.to_json() for k, v in self.per_test.items()},
        }


def failed_report(suite: TestSuite, reason: str) -> ValidationReport:
    """Report for a checker that never compiled: every test fails."""
    per_test = {t.id: TestResult((), t.expected_lines, False, reason) for t in suite}
    return ValidationReport(False, [], list(suite.ids), per_test, reason)


def validate_checker(checker, suite: TestSuite, backend, catalog=None) -> ValidationReport:
    """Compile once, then run on every test.

    A test passes when the multiset of reported lines equals its expected
    lines exactly.  A runtime error fails only the test it happened on.
    """
    source = getattr(checker, "source", checker)
    if catalog is not None:
        from ..minilint import compile_checker

        compile_fn = lambda s: compile_checker(s, catalog)  # noqa: E731
    else:
        compile_fn = backend.compile
    try:
        compiled = compile_fn(source)
    except CompileError as exc:
        return failed_report(suite, f"compile error: {exc.summary()}")
    passed, failed, per_test = [], [], {}
    for test in suite:
        ast = suite.ast(test.id)
        try:
            found = tuple(v.line for v in backend.run(compiled, ast))
            error = None
        except CheckerRuntimeError as exc:
            found, error = (), f"runtime error: {exc}"
        ok = error is None and Counter(found) == Counter(test.expected_lines)
        per_test[test.id] = TestResult(found, test.expected_lines, ok, error)
        (passed if ok else failed).append(test.id)
    return ValidationReport(True, passed, failed, per_test)
