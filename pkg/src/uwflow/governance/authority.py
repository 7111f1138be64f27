"""Human authorization: the single path to a Recorded outcome.

``authorize`` is the only operation in the package that appends a Recorded
event, and it refuses to run outside AwaitingHumanAuth, without a reviewer
identity, or against a stale view of the case.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import TYPE_CHECKING, Any, Callable

from ..gateway.schema import DraftDecision, validate_draft
from .ledger import AuditLedger, EventKind

if TYPE_CHECKING:
    from ..engine import WorkflowCase


class HumanAction(str, Enum):
    ACCEPT = "accept"
    MODIFY = "modify"
    OVERRIDE = "override"
    ESCALATE = "escalate"


class WrongState(RuntimeError):
    pass


class CaseMismatch(RuntimeError):
    pass


class MissingReviewer(RuntimeError):
    pass


class StaleCase(RuntimeError):
    """The case changed since the reviewer loaded it (token mismatch)."""


@dataclass(frozen=True)
class HumanDecision:
    case_id: str
    action: HumanAction
    reviewer_id: str
    final_recommendation: dict[str, Any] | None = None
    notes: str = ""
    timestamp: str = ""

    def fingerprint(self) -> str:
        from .ledger import canonical_json

        return canonical_json(
            {
                "case_id": self.case_id,
                "action": self.action.value,
                "reviewer_id": self.reviewer_id,
                "final_recommendation": self.final_recommendation,
            }
        )


@dataclass(frozen=True)
class RecordedOutcome:
    """What the system-of-record exporter receives. ``recorded`` is False
    only for the escalate action, which diverts instead of recording."""

    case_id: str
    action: HumanAction
    reviewer_id: str
    recorded: bool
    final_recommendation: dict[str, Any] | None
    decided_at: str
    record_seq: int | None
    token_used: str | None
    decision_fingerprint: str = ""
    case: "WorkflowCase" = field(repr=False, compare=False, default=None)  # type: ignore[assignment]

    def to_dict(self) -> dict[str, Any]:
        return {
            "case_id": self.case_id,
            "action": self.action.value,
            "reviewer_id": self.reviewer_id,
            "recorded": self.recorded,
            "final_recommendation": self.final_recommendation,
            "decided_at": self.decided_at,
            "record_seq": self.record_seq,
        }


def concurrency_token(case: WorkflowCase) -> str:
    """Optimistic concurrency token: case id plus transition count."""
    return f"{case.case_id}:{len(case.transition_log)}"


def authorize(
    case: WorkflowCase,
    decision: HumanDecision,
    ledger: AuditLedger,
    draft: DraftDecision | None = None,
    token: str | None = None,
    clock: Callable[[], str] | None = None,
) -> RecordedOutcome:
    """Apply a human decision to a case awaiting authorization.

    Accept records the AI recommendation verbatim (``draft`` must be
    supplied); Modify and Override record the reviewer's schema-valid
    payload; Escalate diverts the case back to the escalation path without
    recording anything.
    """
    # Imported here: the engine module depends on this package at load time.
    from ..engine import CaseState, WorkflowEvent, advance

    now = (clock or (lambda: datetime.now(timezone.utc).isoformat()))()
    if decision.case_id != case.case_id:
        raise CaseMismatch(f"decision for {decision.case_id!r} applied to {case.case_id!r}")
    if not decision.reviewer_id.strip():
        raise MissingReviewer("reviewer_id must be non-empty")
    if token is not None and token != concurrency_token(case):
        raise StaleCase(
            f"case changed since it was loaded (token {token!r}, current {concurrency_token(case)!r})"
        )
    if case.state is not CaseState.AWAITING_HUMAN_AUTH:
        raise WrongState(f"case is in state {case.state.value!r}, not awaiting authorization")

    if decision.action is HumanAction.ESCALATE:
        updated = advance(case, WorkflowEvent.ESCALATE, detail=decision.reviewer_id, now=now)
        ledger.append(
            EventKind.ESCALATION,
            {
                "reason": "reviewer-escalation",
                "reviewer_id": decision.reviewer_id,
                "notes": decision.notes,
            },
            case_id=case.case_id,
        )
        return RecordedOutcome(
            case_id=case.case_id,
            action=decision.action,
            reviewer_id=decision.reviewer_id,
            recorded=False,
            final_recommendation=None,
            decided_at=now,
            record_seq=None,
            token_used=token,
            decision_fingerprint=decision.fingerprint(),
            case=updated,
        )

    if decision.action in (HumanAction.MODIFY, HumanAction.OVERRIDE):
        if decision.final_recommendation is None:
            raise ValueError(f"{decision.action.value} requires final_recommendation")
        final = validate_draft(decision.final_recommendation).to_dict()
    else:
        if draft is None:
            raise ValueError("accept requires the current draft to copy verbatim")
        final = draft.to_dict()

    ledger.append(
        EventKind.HUMAN_DECISION,
        {
            "action": decision.action.value,
            "reviewer_id": decision.reviewer_id,
            "final_recommendation": final,
            "notes": decision.notes,
            "timestamp": decision.timestamp or now,
        },
        case_id=case.case_id,
    )
    updated = advance(case, WorkflowEvent.HUMAN_DECISION, detail=decision.reviewer_id, now=now)
    record = ledger.append(
        EventKind.RECORDED,
        {
            "action": decision.action.value,
            "reviewer_id": decision.reviewer_id,
            "final_recommendation": final,
            "decided_at": now,
        },
        case_id=case.case_id,
    )
    return RecordedOutcome(
        case_id=case.case_id,
        action=decision.action,
        reviewer_id=decision.reviewer_id,
        recorded=True,
        final_recommendation=final,
        decided_at=now,
        record_seq=record.seq,
        token_used=token,
        decision_fingerprint=decision.fingerprint(),
        case=updated,
    )
