"""Rules and their test suites.

A rule directory looks like::

    my_rule/
      rule.json            {"name": ..., "description": ...}
      tests/
        01_basic.minisrc
        01_basic.expect    {"problems": 1, "lines": [4]}
        02_negative.minisrc
        02_negative.expect {"problems": 0, "lines": []}

Tests are ordered by filename; that order is the test's ordinal (1-based),
and the engine always works on the lowest remaining ordinal first.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ParseError, SuiteFormatError
from ..minisrc import AstNode, parse_source

SOURCE_EXT = ".minisrc"
EXPECT_EXT = ".expect"


@dataclass(frozen=True)
class CheckerRule:
    name: str
    description: str

    def __post_init__(self):
        if not self.description.strip():
            raise ValueError("rule description must be non-empty")


@dataclass(frozen=True)
class TestCase:
    id: str
    ordinal: int
    source: str
    expected_problem_count: int
    expected_lines: tuple[int, ...]

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if len(self.expected_lines) != self.expected_problem_count:
            raise SuiteFormatError(
                f"{self.id}: {self.expected_problem_count} problems but "
                f"{len(self.expected_lines)} lines"
            )
        if list(self.expected_lines) != sorted(self.expected_lines):
            raise SuiteFormatError(f"{self.id}: expected lines must be sorted")
        n_lines = self.source.count("\n") + (0 if self.source.endswith("\n") else 1)
        for line in self.expected_lines:
            if not 1 <= line <= n_lines:
                raise SuiteFormatError(f"{self.id}: expected line {line} outside the source")


@dataclass
class TestSuite:
    tests: list[TestCase]
    _asts: dict[str, AstNode] = field(default_factory=dict, repr=False)

    __test__ = False

    def __post_init__(self):
        self.tests = sorted(self.tests, key=lambda t: t.ordinal)
        self.by_id = {t.id: t for t in self.tests}
        if len(self.by_id) != len(self.tests):
            raise SuiteFormatError("duplicate test ids")

    def __len__(self) -> int:
        return len(self.tests)

    def __iter__(self):
        return iter(self.tests)

    @property
    def ids(self) -> list[str]:
        return [t.id for t in self.tests]

    def ast(self, test_id: str) -> AstNode:
        if test_id not in self._asts:
            test = self.by_id[test_id]
            try:
                self._asts[test_id] = parse_source(test.source)
            except ParseError as exc:
                raise SuiteFormatError(f"test {test_id} does not parse: {exc}") from exc
        return self._asts[test_id]


def _read_expect(path: Path) -> tuple[int, tuple[int, ...]]:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        problems = int(data["problems"])
        lines = tuple(sorted(int(x) for x in data["lines"]))
    except (ValueError, KeyError, TypeError) as exc:
        raise SuiteFormatError(f"{path.name}: malformed expect file ({exc})") from exc
    if problems < 0:
        raise SuiteFormatError(f"{path.name}: negative problem count")
    return problems, lines


def load_rule(directory: str | Path) -> CheckerRule:
    path = Path(directory) / "rule.json"
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        return CheckerRule(data.get("name") or Path(directory).name, data["description"])
    except (OSError, ValueError, KeyError) as exc:
        raise SuiteFormatError(f"cannot read {path}: {exc}") from exc


def load_suite(directory: str | Path) -> tuple[CheckerRule, TestSuite]:
    directory = Path(directory)
    rule = load_rule(directory)
    tests_dir = directory / "tests"
    if not tests_dir.is_dir():
        raise SuiteFormatError(f"{directory} has no tests/ directory")
    sources = sorted(tests_dir.glob(f"*{SOURCE_EXT}"))
    expects = {p.stem for p in tests_dir.glob(f"*{EXPECT_EXT}")}
    for orphan in sorted(expects - {p.stem for p in sources}):
        raise SuiteFormatError(f"expect file without source: {orphan}{EXPECT_EXT}")
    tests = []
    for ordinal, src in enumerate(sources, 1):
        if src.stem not in expects:
            raise SuiteFormatError(f"missing expect file for {src.name}")
        problems, lines = _read_expect(src.with_suffix(EXPECT_EXT))
        tests.append(TestCase(src.stem, ordinal, src.read_text(encoding="utf-8"), problems, lines))
    suite = TestSuite(tests)
    for test in suite:
        suite.ast(test.id)
    return rule, suite
