"""Quality, critic, and efficiency metrics over case outcome records, the
failure-mode classifier, and the token cost model.

Rate metrics carry 95% Wilson intervals. Wall-clock timing fields are
deliberately absent: they measure the backend, not this artifact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from enum import Enum
from typing import Any, Iterable

from .stats import mcnemar_test, wilson_interval


class EmptyInput(ValueError):
    pass


class UnpairedComparison(ValueError):
    pass


class SystemKind(str, Enum):
    MANUAL = "manual"
    AGENT_ONLY = "agent_only"
    AGENT_CRITIC = "agent_critic"


class Hallucination(str, Enum):
    NONE = "none"
    MINOR = "minor"
    MAJOR = "major"


class FailureMode(str, Enum):
    FM1_MISSED_EDGE_CASE = "FM1_MissedEdgeCase"
    FM2_OVER_CONSERVATIVE = "FM2_OverConservative"
    FM3_MINOR_HALLUCINATION = "FM3_MinorHallucination"
    FM4_CRITIC_FALSE_ALARM = "FM4_CriticFalseAlarm"
    FM5_SYSTEM_INTEGRATION = "FM5_SystemIntegration"
    NO_FAILURE = "NoFailure"


# First-match priority when several modes apply to one case.
FAILURE_MODE_PRIORITY: tuple[FailureMode, ...] = (
    FailureMode.FM5_SYSTEM_INTEGRATION,
    FailureMode.FM1_MISSED_EDGE_CASE,
    FailureMode.FM2_OVER_CONSERVATIVE,
    FailureMode.FM3_MINOR_HALLUCINATION,
    FailureMode.FM4_CRITIC_FALSE_ALARM,
)

# Strictness order used by the over-conservative rule.
_DECISION_RANK = {
    "bind": 0,
    "bind_with_conditions": 1,
    "refer_to_human": 2,
    "decline": 3,
}


@dataclass(frozen=True)
class CriticFlagRecord:
    category: str
    is_true_issue: bool
    led_to_revision: bool
    corrected: bool

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass
class CaseOutcomeRecord:
    """One case evaluated under one system configuration."""

    case_id: str
    tier: str
    system: SystemKind
    decision: str
    decision_truth: str
    decision_correct: bool
    hallucination: Hallucination
    evidence_complete: bool
    risk_factors_found: frozenset[str]
    risk_factors_truth: frozenset[str]
    compliant: bool
    citations_sound: bool
    boundary_violation: bool
    deferred: bool
    contradiction_present: bool
    contradiction_detected: bool
    critic_flags: tuple[CriticFlagRecord, ...]
    n_true_issues: int
    tokens: tuple[int, int]
    system_error: bool = False
    human_action: str = "accept"

    def to_dict(self) -> dict[str, Any]:
        return {
            "case_id": self.case_id,
            "tier": self.tier,
            "system": self.system.value,
            "decision": self.decision,
            "decision_truth": self.decision_truth,
            "decision_correct": self.decision_correct,
            "hallucination": self.hallucination.value,
            "evidence_complete": self.evidence_complete,
            "risk_factors_found": sorted(self.risk_factors_found),
            "risk_factors_truth": sorted(self.risk_factors_truth),
            "compliant": self.compliant,
            "citations_sound": self.citations_sound,
            "boundary_violation": self.boundary_violation,
            "deferred": self.deferred,
            "contradiction_present": self.contradiction_present,
            "contradiction_detected": self.contradiction_detected,
            "critic_flags": [f.to_dict() for f in self.critic_flags],
            "n_true_issues": self.n_true_issues,
            "tokens": list(self.tokens),
            "system_error": self.system_error,
            "human_action": self.human_action,
        }

    @classmethod
    def from_dict(cls, obj: dict[str, Any]) -> "CaseOutcomeRecord":
        return cls(
            case_id=str(obj["case_id"]),
            tier=str(obj["tier"]),
            system=SystemKind(obj["system"]),
            decision=str(obj["decision"]),
            decision_truth=str(obj["decision_truth"]),
            decision_correct=bool(obj["decision_correct"]),
            hallucination=Hallucination(obj["hallucination"]),
            evidence_complete=bool(obj["evidence_complete"]),
            risk_factors_found=frozenset(obj["risk_factors_found"]),
            risk_factors_truth=frozenset(obj["risk_factors_truth"]),
            compliant=bool(obj["compliant"]),
            citations_sound=bool(obj["citations_sound"]),
            boundary_violation=bool(obj["boundary_violation"]),
            deferred=bool(obj.get("deferred", False)),
            contradiction_present=bool(obj.get("contradiction_present", False)),
            contradiction_detected=bool(obj.get("contradiction_detected", False)),
            critic_flags=tuple(
                CriticFlagRecord(
                    category=str(f["category"]),
                    is_true_issue=bool(f["is_true_issue"]),
                    led_to_revision=bool(f["led_to_revision"]),
                    corrected=bool(f["corrected"]),
                )
                for f in obj.get("critic_flags", [])
            ),
            n_true_issues=int(obj.get("n_true_issues", 0)),
            tokens=(int(obj["tokens"][0]), int(obj["tokens"][1])),
            system_error=bool(obj.get("system_error", False)),
            human_action=str(obj.get("human_action", "accept")),
        )


@dataclass(frozen=True)
class MetricValue:
    estimate: float
    ci: tuple[float, float] | None
    n: int
    sd: float | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "estimate": self.estimate,
            "ci": list(self.ci) if self.ci else None,
            "n": self.n,
            "sd": self.sd,
        }


@dataclass
class MetricsReport:
    system: str
    n_cases: int
    metrics: dict[str, MetricValue]
    by_tier: dict[str, "MetricsReport"] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        out = {
            "system": self.system,
            "n_cases": self.n_cases,
            "metrics": {k: v.to_dict() for k, v in self.metrics.items()},
        }
        if self.by_tier:
            out["by_tier"] = {k: v.to_dict() for k, v in self.by_tier.items()}
        return out


def _rate(successes: int, n: int) -> MetricValue:
    if n == 0:
        return MetricValue(estimate=float("nan"), ci=None, n=0)
    return MetricValue(estimate=successes / n, ci=wilson_interval(successes, n), n=n)


def _compute_one(records: list[CaseOutcomeRecord], system: str) -> MetricsReport:
    n = len(records)
    correct = sum(r.decision_correct for r in records)
    halluc = sum(r.hallucination is not Hallucination.NONE for r in records)
    evidence = sum(r.evidence_complete for r in records)
    compliant = sum(r.compliant for r in records)
    traceable = sum(r.citations_sound for r in records)
    overrides = sum(r.human_action not in ("accept", "") for r in records)

    contra_present = [r for r in records if r.contradiction_present]
    contra_detected = sum(r.contradiction_detected for r in contra_present)

    truth_total = sum(len(r.risk_factors_truth) for r in records)
    found_true = sum(len(r.risk_factors_found & r.risk_factors_truth) for r in records)
    found_total = sum(len(r.risk_factors_found) for r in records)

    all_flags = [f for r in records for f in r.critic_flags]
    true_issues = sum(r.n_true_issues for r in records)
    true_flags = [f for f in all_flags if f.is_true_issue]
    false_flags = [f for f in all_flags if not f.is_true_issue]
    corrected = sum(f.corrected for f in true_flags)

    flagged_counts = [len(r.critic_flags) for r in records if r.critic_flags]
    if flagged_counts:
        mean_flags = sum(flagged_counts) / len(flagged_counts)
        var = sum((x - mean_flags) ** 2 for x in flagged_counts) / len(flagged_counts)
        flags_metric = MetricValue(estimate=mean_flags, ci=None,
                                   n=len(flagged_counts), sd=math.sqrt(var))
    else:
        flags_metric = MetricValue(estimate=0.0, ci=None, n=0, sd=0.0)

    metrics = {
        "decision_accuracy": _rate(correct, n),
        "hallucination_rate": _rate(halluc, n),
        "evidence_completeness": _rate(evidence, n),
        "contradiction_detection": _rate(contra_detected, len(contra_present)),
        "source_traceability": _rate(traceable, n),
        "guideline_compliance": _rate(compliant, n),
        "risk_recall": _rate(found_true, truth_total),
        "risk_precision": _rate(found_true, found_total),
        "catch_rate": _rate(len(true_flags), true_issues),
        "false_positive_rate": _rate(len(false_flags), len(all_flags)),
        "correction_success": _rate(corrected, len(true_flags)),
        "flags_per_flagged_case": flags_metric,
        "cases_with_flags": _rate(len(flagged_counts), n),
        "override_rate": _rate(overrides, n),
        "boundary_violation_rate": _rate(sum(r.boundary_violation for r in records), n),
    }
    return MetricsReport(system=system, n_cases=n, metrics=metrics)


def compute_metrics(records: list[CaseOutcomeRecord],
                    stratify_by_tier: bool = False) -> MetricsReport:
    """Metric battery over records from a single system configuration.

    catch_rate = true issues flagged / true issues present;
    false_positive_rate = non-issue flags / total flags;
    correction_success = corrected / flagged true issues;
    hallucination_rate counts cases with any hallucination.
    """
    if not records:
        raise EmptyInput("no records to evaluate")
    systems = {r.system for r in records}
    if len(systems) > 1:
        raise UnpairedComparison(
            f"records mix systems {sorted(s.value for s in systems)}; compute per system"
        )
    report = _compute_one(records, system=records[0].system.value)
    if stratify_by_tier:
        for tier in sorted({r.tier for r in records}):
            subset = [r for r in records if r.tier == tier]
            report.by_tier[tier] = _compute_one(subset, system=records[0].system.value)
    return report


def compare_systems(
    records: list[CaseOutcomeRecord],
    system_a: SystemKind,
    system_b: SystemKind,
    outcome: str = "decision_correct",
) -> dict[str, Any]:
    """Paired McNemar comparison of two systems on the same cases."""
    a_by_case = {r.case_id: r for r in records if r.system is system_a}
    b_by_case = {r.case_id: r for r in records if r.system is system_b}
    if not a_by_case or not b_by_case:
        raise EmptyInput("one of the systems has no records")
    if set(a_by_case) != set(b_by_case):
        raise UnpairedComparison("case ids do not pair across the two systems")

    def value(r: CaseOutcomeRecord) -> bool:
        if outcome == "decision_correct":
            return r.decision_correct
        if outcome == "compliant":
            return r.compliant
        if outcome == "citations_sound":
            return r.citations_sound
        raise ValueError(f"unsupported outcome {outcome!r}")

    b_count = sum(
        1 for cid in a_by_case if value(a_by_case[cid]) and not value(b_by_case[cid])
    )
    c_count = sum(
        1 for cid in a_by_case if not value(a_by_case[cid]) and value(b_by_case[cid])
    )
    return {
        "outcome": outcome,
        "system_a": system_a.value,
        "system_b": system_b.value,
        "n_pairs": len(a_by_case),
        "discordant_a_only": b_count,
        "discordant_b_only": c_count,
        "p_value": mcnemar_test(b_count, c_count),
    }


def classify_failure(record: CaseOutcomeRecord) -> FailureMode:
    """Deterministic single label per evaluated case, first match in the
    published priority order (FM5, FM1, FM2, FM3, FM4)."""
    applicable: set[FailureMode] = set()
    if record.system_error:
        applicable.add(FailureMode.FM5_SYSTEM_INTEGRATION)
    if record.risk_factors_truth - record.risk_factors_found:
        applicable.add(FailureMode.FM1_MISSED_EDGE_CASE)
    rank_made = _DECISION_RANK.get(record.decision)
    rank_truth = _DECISION_RANK.get(record.decision_truth)
    if rank_made is not None and rank_truth is not None and rank_made > rank_truth:
        applicable.add(FailureMode.FM2_OVER_CONSERVATIVE)
    if record.hallucination is Hallucination.MINOR and record.decision_correct:
        applicable.add(FailureMode.FM3_MINOR_HALLUCINATION)
    if any(not f.is_true_issue for f in record.critic_flags):
        applicable.add(FailureMode.FM4_CRITIC_FALSE_ALARM)
    for mode in FAILURE_MODE_PRIORITY:
        if mode in applicable:
            return mode
    return FailureMode.NO_FAILURE


def estimate_cost(tokens_per_pass: Iterable[tuple[int, int]],
                  pricing: tuple[float, float]) -> float:
    """Dollar cost of a sequence of (input, output) token passes at
    (in_rate, out_rate) dollars per million tokens."""
    in_rate, out_rate = pricing
    total = 0.0
    for tokens_in, tokens_out in tokens_per_pass:
        if tokens_in < 0 or tokens_out < 0:
            raise ValueError("token counts must be non-negative")
        total += tokens_in * in_rate / 1e6 + tokens_out * out_rate / 1e6
    return total


# ---------------------------------------------------------------------------
# IO and rendering
# ---------------------------------------------------------------------------

def write_records_jsonl(records: Iterable[CaseOutcomeRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")


def read_records_jsonl(path: str) -> list[CaseOutcomeRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(CaseOutcomeRecord.from_dict(json.loads(line)))
    return records


_TABLE_ROWS = [
    ("Decision Accuracy", "decision_accuracy"),
    ("Hallucination Rate", "hallucination_rate"),
    ("Evidence Completeness", "evidence_completeness"),
    ("Contradiction Detection", "contradiction_detection"),
    ("Source Traceability", "source_traceability"),
    ("Guideline Compliance", "guideline_compliance"),
    ("Risk Factor Recall", "risk_recall"),
    ("Risk Factor Precision", "risk_precision"),
    ("Critic Catch Rate", "catch_rate"),
    ("False Positive Rate", "false_positive_rate"),
    ("Correction Success Rate", "correction_success"),
    ("Cases with Critic Flags", "cases_with_flags"),
    ("Override Rate", "override_rate"),
    ("Boundary Violation Rate", "boundary_violation_rate"),
]


def _fmt(value: MetricValue) -> str:
    if value.n == 0 or value.estimate != value.estimate:
        return "n/a"
    if value.ci is None:
        sd = f", SD={value.sd:.2f}" if value.sd is not None else ""
        return f"{value.estimate:.2f}{sd} (n={value.n})"
    lo, hi = value.ci
    return f"{value.estimate * 100:.1f}% ({lo * 100:.1f}-{hi * 100:.1f})"


def render_report_table(reports: list[MetricsReport]) -> str:
    """Plain-text comparison table, one column per system."""
    header = ["Metric"] + [f"{r.system} (n={r.n_cases})" for r in reports]
    rows = [header]
    for label, key in _TABLE_ROWS:
        row = [label]
        for report in reports:
            row.append(_fmt(report.metrics[key]))
        rows.append(row)
    mean_row = ["Flags per Flagged Case"]
    for report in reports:
        mean_row.append(_fmt(report.metrics["flags_per_flagged_case"]))
    rows.append(mean_row)

    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = []
    for i, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def render_tier_breakdown(report: MetricsReport) -> str:
    """Per-tier decision accuracy block (the stratified view)."""
    lines = [f"system: {report.system}"]
    for tier, sub in sorted(report.by_tier.items()):
        acc = sub.metrics["decision_accuracy"]
        lines.append(f"  {tier:8s} n={sub.n_cases:4d}  accuracy {_fmt(acc)}")
    return "\n".join(lines)
