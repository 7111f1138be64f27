"""Authority gate and tamper-evident audit ledger."""

from .ledger import (
    AuditLedger,
    AuditRecord,
    EventKind,
    FileLedgerStore,
    MemoryLedgerStore,
    PersistenceFailure,
    VerificationReport,
    append,
    canonical_json,
    verify_chain,
    verify_ledger_file,
)
from .boundary import BoundaryPattern, BoundaryReport, detect_boundary_violation
from .authority import (
    CaseMismatch,
    HumanAction,
    HumanDecision,
    MissingReviewer,
    RecordedOutcome,
    StaleCase,
    WrongState,
    authorize,
    concurrency_token,
)

__all__ = [
    "AuditLedger",
    "AuditRecord",
    "BoundaryPattern",
    "BoundaryReport",
    "CaseMismatch",
    "EventKind",
    "FileLedgerStore",
    "HumanAction",
    "HumanDecision",
    "MemoryLedgerStore",
    "MissingReviewer",
    "PersistenceFailure",
    "RecordedOutcome",
    "StaleCase",
    "VerificationReport",
    "WrongState",
    "append",
    "authorize",
    "canonical_json",
    "concurrency_token",
    "detect_boundary_violation",
    "verify_chain",
    "verify_ledger_file",
]
