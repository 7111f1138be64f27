"""Measurement harness: statistics kernel, metrics, failure modes, cost."""

from .stats import DomainError, fisher_exact, mcnemar_test, wilson_interval
from .metrics import (
    CaseOutcomeRecord,
    CriticFlagRecord,
    EmptyInput,
    FailureMode,
    Hallucination,
    MetricValue,
    MetricsReport,
    SystemKind,
    UnpairedComparison,
    classify_failure,
    compare_systems,
    compute_metrics,
    estimate_cost,
    read_records_jsonl,
    render_report_table,
    write_records_jsonl,
)

__all__ = [
    "CaseOutcomeRecord",
    "CriticFlagRecord",
    "DomainError",
    "EmptyInput",
    "FailureMode",
    "Hallucination",
    "MetricValue",
    "MetricsReport",
    "SystemKind",
    "UnpairedComparison",
    "classify_failure",
    "compare_systems",
    "compute_metrics",
    "estimate_cost",
    "fisher_exact",
    "mcnemar_test",
    "read_records_jsonl",
    "render_report_table",
    "wilson_interval",
    "write_records_jsonl",
]
