"""Test suites, checker validation, metrics and ruleset evaluation."""

from .metrics import Metrics, compute_metrics, format_table, tpr
from .suite import CheckerRule, TestCase, TestSuite, load_rule, load_suite
from .validation import TestResult, ValidationReport, failed_report, validate_checker
from .evaluation import EvalResult, rule_dirs, run_eval

__all__ = [
    "CheckerRule",
    "EvalResult",
    "Metrics",
    "TestCase",
    "TestResult",
    "TestSuite",
    "ValidationReport",
    "compute_metrics",
    "failed_report",
    "format_table",
    "load_rule",
    "load_suite",
    "rule_dirs",
    "run_eval",
    "tpr",
    "validate_checker",
]
