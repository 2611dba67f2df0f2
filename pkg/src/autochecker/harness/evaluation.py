"""Run the engine over a whole ruleset and keep the best run."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable

from ..errors import AutoCheckerError
from .metrics import Metrics, compute_metrics
from .suite import load_suite
from .validation import ValidationReport, failed_report

# (rule_dir, run_index) -> TdcdDeps
DepsFactory = Callable[[Path, int], object]


def rule_dirs(ruleset_dir: str | Path) -> list[Path]:
    root = Path(ruleset_dir)
    return sorted(p for p in root.iterdir() if (p / "rule.json").is_file())


def _run_rule(rule_dir: Path, run_index: int, make_deps: DepsFactory, config) -> tuple[dict, ValidationReport]:
    from ..tdcd import run_tdcd

    suite = None
    try:
        rule, suite = load_suite(rule_dir)
        outcome = run_tdcd(rule, suite, make_deps(rule_dir, run_index), config)
    except (AutoCheckerError, OSError, ValueError) as exc:
        entry = {
            "tpr": "0",
            "tpr_float": 0.0,
            "rounds": 0,
            "skipped": [],
            "compile_ok": False,
            "error": f"{type(exc).__name__}: {exc}",
        }
        # a rule whose suite loaded still counts its tests, all failed
        report = failed_report(suite, str(exc)) if suite is not None else ValidationReport(False, [], [], {}, str(exc))
        return entry, report
    entry = {
        "tpr": str(outcome.pr_f),
        "tpr_float": float(outcome.pr_f),
        "rounds": len(outcome.rounds),
        "skipped": outcome.skipped,
        "compile_ok": outcome.report.compile_ok,
        "round_cap_reached": outcome.round_cap_reached,
        "error": None,
    }
    return entry, outcome.report


@dataclass
class EvalResult:
    runs: list[tuple[int, Fraction]]
    best_run: int
    rules: dict[str, dict]
    metrics: Metrics

    def to_json(self) -> dict:
        return {
            "runs": [{"run": k, "tpr_avg": str(v)} for k, v in self.runs],
            "best_run": self.best_run,
            "rules": self.rules,
            "metrics": self.metrics.to_json(),
        }


def run_eval(
    ruleset_dir: str | Path,
    make_deps: DepsFactory,
    runs: int = 1,
    config=None,
    jobs: int = 1,
) -> EvalResult:
    """Evaluate every rule ``runs`` times; report the run with the best TPR_avg.

    Rules are independent, so with ``jobs > 1`` they run on a thread pool.
    Output is always merged in rule-name order.
    """
    if runs < 1:
        raise ValueError("runs must be positive")
    dirs = rule_dirs(ruleset_dir)
    run_docs = []
    for k in range(1, runs + 1):
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(lambda d: _run_rule(d, k, make_deps, config), dirs))
        else:
            results = [_run_rule(d, k, make_deps, config) for d in dirs]
        names = [d.name for d in dirs]
        rules = {n: entry for n, (entry, _) in zip(names, results)}
        metrics = compute_metrics({n: rep for n, (_, rep) in zip(names, results)})
        run_docs.append({"run": k, "rules": rules, "metrics": metrics})
    best = run_docs[0]
    for doc in run_docs[1:]:
        if doc["metrics"].tpr_avg > best["metrics"].tpr_avg:
            best = doc
    return EvalResult(
        [(d["run"], d["metrics"].tpr_avg) for d in run_docs], best["run"], best["rules"], best["metrics"]
    )
