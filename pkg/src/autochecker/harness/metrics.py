"""Rule-level metrics over final validation reports."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .validation import ValidationReport


@dataclass
class Metrics:
    rule_pc: int = 0
    rule_pot: int = 0
    rule_pat: int = 0
    tc_pass: int = 0
    tc_total: int = 0
    tpr_per_rule: dict[str, Fraction] = field(default_factory=dict)
    tpr_avg: Fraction = Fraction(0)

    def to_json(self) -> dict:
        return {
            "rule_pc": self.rule_pc,
            "rule_pot": self.rule_pot,
            "rule_pat": self.rule_pat,
            "rules": len(self.tpr_per_rule),
            "tc_pass": self.tc_pass,
            "tc_total": self.tc_total,
            "tpr_avg": str(self.tpr_avg),
            "tpr_avg_float": float(self.tpr_avg),
            "tpr_per_rule": {k: str(v) for k, v in self.tpr_per_rule.items()},
        }


def tpr(report: ValidationReport) -> Fraction:
    """Passed tests over all tests."""
    return report.pr


def compute_metrics(outcomes: dict[str, ValidationReport]) -> Metrics:
    m = Metrics()
    for name in sorted(outcomes):
        report = outcomes[name]
        rate = tpr(report)
        m.tpr_per_rule[name] = rate
        m.tc_total += report.total
        if not report.compile_ok:
            continue
        m.rule_pc += 1
        m.tc_pass += len(report.passed)
        if report.passed:
            m.rule_pot += 1
            if not report.failed:
                m.rule_pat += 1
    if m.tpr_per_rule:
        m.tpr_avg = sum(m.tpr_per_rule.values(), Fraction(0)) / len(m.tpr_per_rule)
    return m


def format_table(metrics: Metrics) -> str:
    width = max([len("rule")] + [len(n) for n in metrics.tpr_per_rule])
    lines = [f"{'rule':<{width}}  TPR"]
    for name, rate in metrics.tpr_per_rule.items():
        lines.append(f"{name:<{width}}  {float(rate):6.2%}")
    lines.append("")
    lines.append(
        f"#Rule_pc={metrics.rule_pc}  #Rule_pot={metrics.rule_pot}  #Rule_pat={metrics.rule_pat}  "
        f"#TC_pass={metrics.tc_pass}/{metrics.tc_total}  TPR_avg={float(metrics.tpr_avg):.2%}"
    )
    return "\n".join(lines) + "\n"
