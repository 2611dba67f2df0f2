"""Test-driven checker development.

The engine works through the test suite one test at a time.  Each round it
picks the lowest-ordinal test still in the candidate pool, retrieves API
contexts once, and then asks the LLM for a checker (or a refinement of the
current one) up to ``max_retry_times`` times.  An attempt is accepted when the
selected test passes and nothing that passed before the round fails.  A test
that exhausts its attempts is skipped for good.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from .catalog import ApiContext
from .errors import DecompositionError, EmptySuite, LlmError, NormalizationError
from .harness.suite import CheckerRule, TestCase, TestSuite
from .harness.validation import ValidationReport, failed_report, validate_checker
from .minilint import CheckerArtifact, normalize_header
from .minisrc import render_ast
from .retrieval import RetrievalResult, Retriever

INITIAL, REFINE = "initial", "refine"

_FENCE = re.compile(r"```[^\n]*\n(.*?)```", re.DOTALL)


@dataclass(frozen=True)
class TdcdConfig:
    max_retry_times: int = 5
    round_cap: Optional[int] = None  # None means round_cap_factor * |suite|
    feedback_in_retry: bool = False
    round_cap_factor: int = 3

    def __post_init__(self):
        if self.max_retry_times < 1:
            raise ValueError("max_retry_times must be at least 1")
        if self.round_cap is not None and self.round_cap < 1:
            raise ValueError("round_cap must be positive")
        if self.round_cap_factor < 1:
            raise ValueError("round_cap_factor must be positive")

    def cap_for(self, suite_size: int) -> int:
        return self.round_cap if self.round_cap is not None else self.round_cap_factor * suite_size


@dataclass
class TdcdDeps:
    retriever: Retriever
    backend: Any  # MiniLint-like: compile(source), run(compiled, ast)
    llm: Any
    template: str


@dataclass
class TdcdState:
    candidates: set[str]
    passed: set[str] = field(default_factory=set)
    skipped: set[str] = field(default_factory=set)
    round: int = 0
    attempt: int = 0
    current_checker: Optional[CheckerArtifact] = None
    last_report: Optional[ValidationReport] = None


@dataclass(frozen=True)
class RoundRecord:
    round: int
    selected: str
    attempts: int
    accepted: bool
    skipped: bool
    candidates: tuple[str, ...]
    passed: tuple[str, ...]
    skipped_set: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "round": self.round,
            "selected": self.selected,
            "attempts": self.attempts,
            "accepted": self.accepted,
            "skipped": self.skipped,
            "T_c": list(self.candidates),
            "T_p": list(self.passed),
            "T_s": list(self.skipped_set),
        }


@dataclass
class TdcdOutcome:
    final_checker: Optional[CheckerArtifact]
    pr_f: Fraction
    report: ValidationReport
    rounds: list[RoundRecord]
    replay: list[dict]
    round_cap_reached: bool = False

    @property
    def skipped(self) -> list[str]:
        return list(self.rounds[-1].skipped_set) if self.rounds else []

    def trajectory(self) -> list[tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...], bool]]:
        return [(r.candidates, r.passed, r.skipped_set, r.accepted) for r in self.rounds]

    def replay_text(self) -> str:
        return "".join(json.dumps(rec, sort_keys=True) + "\n" for rec in self.replay)

    def to_json(self) -> dict:
        return {
            "pr_f": str(self.pr_f),
            "pr_f_float": float(self.pr_f),
            "rounds": len(self.rounds),
            "round_cap_reached": self.round_cap_reached,
            "skipped": self.skipped,
            "trajectory": [r.to_json() for r in self.rounds],
            "final_report": self.report.to_json(),
        }


# -- prompts ----------------------------------------------------------------------


def render_contexts(contexts: list[ApiContext]) -> str:
    if not contexts:
        return "(none retrieved)"
    return "\n\n".join(f"{c.description}\n{c.payload}" for c in contexts)


def build_prompt(
    kind: str,
    rule: CheckerRule,
    test: TestCase,
    ast_dump: str,
    template: str,
    contexts: list[ApiContext],
    prior_checker: Optional[str] = None,
    feedback: Optional[str] = None,
) -> str:
    if kind not in (INITIAL, REFINE):
        raise ValueError(f"unknown prompt kind {kind!r}")
    if kind == REFINE and prior_checker is None:
        raise ValueError("a refine prompt needs the prior checker")
    if kind == INITIAL:
        task = "Write a checker for the rule below so that it reports exactly the expected problems in the test case."
    else:
        task = "Refine the last-generated checker so that it also handles the test case below, without breaking what it already handles."
    sections = [
        ("RULE DESCRIPTION", rule.description),
        ("TEST CASE CODE", test.source),
        ("TEST CASE AST", ast_dump),
        ("RELATED API-CONTEXTS", render_contexts(contexts)),
        ("CHECKER TEMPLATE", template),
    ]
    if kind == REFINE:
        sections.append(("LAST-GENERATED CHECKER", prior_checker))
    if feedback:
        sections.append(("FEEDBACK", feedback))
    parts = [task, "Use only the APIs listed in the API-contexts. Answer with the checker in one fenced code block.", ""]
    for label, body in sections:
        parts.append(f"### {label}")
        parts.append(body.rstrip("\n"))
        parts.append("")
    return "\n".join(parts)


def extract_checker(response: str, template: str) -> str:
    """First fenced block (or the whole reply), with the header normalised.

    A reply without any visitor block is returned as is; it will simply fail
    to compile.
    """
    m = _FENCE.search(response)
    source = m.group(1) if m else response
    try:
        return normalize_header(source, template)
    except NormalizationError:
        return source


def feedback_summary(report: ValidationReport) -> str:
    if not report.compile_ok:
        return f"The last checker did not compile: {report.compile_error}"
    return "The last checker failed these tests: " + ", ".join(report.failed)


# -- loop -------------------------------------------------------------------------------


def pick_next_test(pool: set[str], suite: TestSuite) -> TestCase:
    if not pool:
        raise ValueError("candidate pool is empty")
    return min((suite.by_id[i] for i in pool), key=lambda t: t.ordinal)


def accept_round(report: ValidationReport, test_id: str, passed_before: set[str]) -> bool:
    return test_id in report.passed and not (set(report.failed) & passed_before)


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def _ordered(ids, suite: TestSuite) -> tuple[str, ...]:
    return tuple(sorted(ids, key=lambda i: suite.by_id[i].ordinal))


def run_tdcd(
    rule: CheckerRule,
    suite: TestSuite,
    deps: TdcdDeps,
    config: Optional[TdcdConfig] = None,
    initial_checker: Optional[str] = None,
) -> TdcdOutcome:
    config = config or TdcdConfig()
    if len(suite) == 0:
        raise EmptySuite("test suite has no tests")
    round_cap = config.cap_for(len(suite))
    state = TdcdState(candidates=set(suite.ids))
    if initial_checker is not None:
        state.current_checker = CheckerArtifact(initial_checker)
    rounds: list[RoundRecord] = []
    replay: list[dict] = []

    while state.candidates and state.round < round_cap:
        state.round += 1
        test = pick_next_test(state.candidates, suite)
        ast = suite.ast(test.id)
        try:
            retrieved = deps.retriever.retrieve(rule, test, ast)
        except DecompositionError:
            retrieved = deps.retriever.fallback()
        replay.append(_retrieve_record(state.round, test.id, retrieved))
        ast_dump = render_ast(ast)
        passed_before = set(state.passed)

        # a failed decomposition costs the round one attempt
        j = 1 if retrieved.decomposition_failed else 0
        accepted = False
        while j < config.max_retry_times:
            j += 1
            state.attempt = j
            record = {
                "event": "attempt",
                "round": state.round,
                "attempt": j,
                "selected_test": test.id,
                "subops": [s.text for s in retrieved.subops],
                "hits": [h.hit for h in retrieved.per_subop],
                "context_hashes": [_digest(c.payload) for c in retrieved.contexts],
            }
            prior = state.current_checker
            kind = INITIAL if prior is None else REFINE
            feedback = None
            if config.feedback_in_retry and state.last_report is not None and j > 1:
                feedback = feedback_summary(state.last_report)
            prompt = build_prompt(
                kind, rule, test, ast_dump, deps.template, retrieved.contexts,
                None if prior is None else prior.source, feedback,
            )
            record["kind"] = kind
            try:
                response = deps.llm.generate(prompt, "generate" if kind == INITIAL else "refine")
            except LlmError as exc:
                record.update(llm_error=str(exc), compile="not-run", passed=[], failed=[], accepted=False)
                replay.append(record)
                continue
            source = extract_checker(response or "", deps.template)
            if not source.strip():
                record.update(llm_error="empty response", compile="not-run", passed=[], failed=[], accepted=False)
                replay.append(record)
                continue
            state.current_checker = CheckerArtifact(source, state.round, j)
            report = validate_checker(state.current_checker, suite, deps.backend)
            state.last_report = report
            accepted = accept_round(report, test.id, passed_before)
            record.update(
                checker_hash=_digest(source),
                compile="ok" if report.compile_ok else "error",
                compile_error=report.compile_error,
                passed=list(report.passed),
                failed=list(report.failed),
                accepted=accepted,
            )
            replay.append(record)
            if accepted:
                break

        skipped = not accepted
        if skipped:
            state.skipped.add(test.id)
            replay.append({"event": "skip", "round": state.round, "selected_test": test.id, "attempts": j})
        report = _current_report(state, suite, deps)
        state.passed = set(report.passed)
        state.candidates = set(report.failed) - state.skipped
        rounds.append(
            RoundRecord(
                state.round, test.id, j, accepted, skipped,
                _ordered(state.candidates, suite),
                _ordered(state.passed, suite),
                _ordered(state.skipped, suite),
            )
        )

    cap_hit = bool(state.candidates)
    if cap_hit:
        replay.append({"event": "round_cap_reached", "round": state.round, "round_cap": round_cap})
    final = _current_report(state, suite, deps)
    pr_f = Fraction(len(final.passed), len(suite))
    return TdcdOutcome(state.current_checker, pr_f, final, rounds, replay, cap_hit)


def _current_report(state: TdcdState, suite: TestSuite, deps: TdcdDeps) -> ValidationReport:
    if state.last_report is None:
        if state.current_checker is None:
            return failed_report(suite, "no checker generated")
        state.last_report = validate_checker(state.current_checker, suite, deps.backend)
    return state.last_report


def _retrieve_record(round_no: int, test_id: str, result: RetrievalResult) -> dict:
    return {
        "event": "retrieve",
        "round": round_no,
        "selected_test": test_id,
        "decomposition_failed": result.decomposition_failed,
        "per_subop": [
            {"subop": h.subop.text, "hit": h.hit, "score": None if h.score is None else round(h.score, 6),
             "payload_hash": None if h.context is None else _digest(h.context.payload)}
            for h in result.per_subop
        ],
        "context_hashes": [_digest(c.payload) for c in result.contexts],
    }
