"""Guarded state machine driving each case from ingestion to recorded outcome.

The machine enforces the one-cycle critique loop, the human-authorization
gate in front of Record, and graceful degradation to Escalated from every
non-terminal state. ``advance`` is a pure function over (case, event); the
engine object adds orchestration, artifact storage, and per-case locking.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Callable

from .gateway import backends as gw
from .gateway.schema import DraftDecision, SchemaViolation, Verdict
from .governance.boundary import detect_boundary_violation
from .governance.ledger import AuditLedger, EventKind
from .knowledge import GuidelineChunk, RetrievalStore, ToolRegistry
from .submission import Submission


class CaseState(str, Enum):
    INGEST = "ingest"
    ANALYZE = "analyze"
    CRITIQUE = "critique"
    REVISE = "revise"
    DECISION = "decision"
    AWAITING_HUMAN_AUTH = "awaiting_human_auth"
    RECORD = "record"
    ESCALATED = "escalated"
    CLOSED = "closed"  # terminal resolution of an escalated case by a human


TERMINAL_STATES = frozenset({CaseState.RECORD, CaseState.CLOSED})


class WorkflowEvent(str, Enum):
    INGEST_COMPLETE = "ingest-complete"
    DRAFT_PRODUCED = "draft-produced"
    CRITIC_FLAGS_FOUND = "critic-flags-found"
    CRITIC_CLEAN = "critic-clean"
    REVISION_PRODUCED = "revision-produced"
    RECOMMENDATION_FINALIZED = "recommendation-finalized"
    HUMAN_DECISION = "human-decision"
    ESCALATE = "escalate"
    HUMAN_RESOLVED = "human-resolved"
    HUMAN_CLOSED = "human-closed"


class GuardReason(str, Enum):
    SCHEMA_INVALID = "SchemaInvalid"
    LOW_CONFIDENCE = "LowConfidence"
    OUT_OF_APPETITE = "OutOfAppetite"
    NON_CONVERGENT = "NonConvergent"
    BOUNDARY_VIOLATION = "BoundaryViolation"
    CLEAN = "Clean"


class IllegalTransition(RuntimeError):
    def __init__(self, state: CaseState, event: WorkflowEvent):
        super().__init__(f"event {event.value!r} is not legal in state {state.value!r}")
        self.state = state
        self.event = event


CYCLE_EXHAUSTED_DETAIL = "cycle-exhausted: proceeding to decision with unresolved flags"

# Base transition table. critic-flags-found from Critique is additionally
# guarded on the cycle budget (see advance); from Revise it always lands in
# Decision because the single allowed cycle is already in use.
_TRANSITIONS: dict[tuple[CaseState, WorkflowEvent], CaseState] = {
    (CaseState.INGEST, WorkflowEvent.INGEST_COMPLETE): CaseState.ANALYZE,
    (CaseState.ANALYZE, WorkflowEvent.DRAFT_PRODUCED): CaseState.CRITIQUE,
    (CaseState.CRITIQUE, WorkflowEvent.CRITIC_FLAGS_FOUND): CaseState.REVISE,
    (CaseState.CRITIQUE, WorkflowEvent.CRITIC_CLEAN): CaseState.DECISION,
    (CaseState.REVISE, WorkflowEvent.CRITIC_FLAGS_FOUND): CaseState.DECISION,
    (CaseState.REVISE, WorkflowEvent.REVISION_PRODUCED): CaseState.DECISION,
    (CaseState.DECISION, WorkflowEvent.RECOMMENDATION_FINALIZED): CaseState.AWAITING_HUMAN_AUTH,
    (CaseState.AWAITING_HUMAN_AUTH, WorkflowEvent.HUMAN_DECISION): CaseState.RECORD,
    (CaseState.ESCALATED, WorkflowEvent.HUMAN_RESOLVED): CaseState.AWAITING_HUMAN_AUTH,
    (CaseState.ESCALATED, WorkflowEvent.HUMAN_CLOSED): CaseState.CLOSED,
}

# Graceful degradation: escalation is legal from every non-terminal state
# (idempotent from Escalated itself).
for _state in CaseState:
    if _state not in TERMINAL_STATES:
        _TRANSITIONS[(_state, WorkflowEvent.ESCALATE)] = CaseState.ESCALATED


@dataclass(frozen=True)
class TransitionEntry:
    from_state: CaseState
    to_state: CaseState
    event: WorkflowEvent
    timestamp: str
    detail: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "from_state": self.from_state.value,
            "to_state": self.to_state.value,
            "event": self.event.value,
            "timestamp": self.timestamp,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class WorkflowCase:
    case_id: str
    submission_ref: str
    state: CaseState = CaseState.INGEST
    critique_cycles_used: int = 0
    draft_history: tuple[str, ...] = ()
    critique_history: tuple[str, ...] = ()
    transition_log: tuple[TransitionEntry, ...] = ()
    line_of_business: str = ""
    tier: str = "medium"
    submitted_at: str = ""

    def last_escalation_detail(self) -> str:
        for entry in reversed(self.transition_log):
            if entry.event is WorkflowEvent.ESCALATE:
                return entry.detail
        return ""

    def passed_through(self, state: CaseState) -> bool:
        if self.state is state:
            return True
        return any(e.to_state is state or e.from_state is state for e in self.transition_log)

    def to_dict(self) -> dict[str, Any]:
        return {
            "case_id": self.case_id,
            "submission_ref": self.submission_ref,
            "state": self.state.value,
            "critique_cycles_used": self.critique_cycles_used,
            "draft_history": list(self.draft_history),
            "critique_history": list(self.critique_history),
            "transition_log": [e.to_dict() for e in self.transition_log],
            "line_of_business": self.line_of_business,
            "tier": self.tier,
            "submitted_at": self.submitted_at,
        }


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def advance(case: WorkflowCase, event: WorkflowEvent, detail: str = "",
            now: str | None = None) -> WorkflowCase:
    """Apply one event; returns the successor case with the log extended.

    Pure over (state, event, cycle budget). A critic-flags-found event with
    the cycle budget spent does not revise again: the case proceeds to
    Decision and the transition detail records the exhaustion, so unresolved
    flags stay visible to the human reviewer.
    """
    key = (case.state, event)
    if key not in _TRANSITIONS:
        raise IllegalTransition(case.state, event)
    if event is WorkflowEvent.HUMAN_DECISION and not detail.strip():
        raise IllegalTransition(case.state, event)

    target = _TRANSITIONS[key]
    cycles = case.critique_cycles_used
    if event is WorkflowEvent.CRITIC_FLAGS_FOUND:
        if case.state is CaseState.CRITIQUE and cycles == 0:
            target = CaseState.REVISE
        else:
            target = CaseState.DECISION
            detail = (detail + "; " if detail else "") + CYCLE_EXHAUSTED_DETAIL
    if event is WorkflowEvent.REVISION_PRODUCED:
        cycles += 1

    entry = TransitionEntry(
        from_state=case.state,
        to_state=target,
        event=event,
        timestamp=now if now is not None else _now(),
        detail=detail,
    )
    return replace(
        case,
        state=target,
        critique_cycles_used=cycles,
        transition_log=case.transition_log + (entry,),
    )


def legal_events(state: CaseState) -> list[WorkflowEvent]:
    return sorted({e for (s, e) in _TRANSITIONS if s is state}, key=lambda e: e.value)


def replay(case: WorkflowCase) -> WorkflowCase:
    """Re-apply the logged events to a fresh case; determinism means the
    result matches the input's state and cycle count exactly."""
    fresh = WorkflowCase(
        case_id=case.case_id,
        submission_ref=case.submission_ref,
        line_of_business=case.line_of_business,
        tier=case.tier,
        submitted_at=case.submitted_at,
    )
    for entry in case.transition_log:
        fresh = advance(fresh, entry.event, detail=entry.detail, now=entry.timestamp)
    return fresh


def transition_table_json() -> dict[str, Any]:
    """Machine-readable description for documentation and the reviewer UI."""
    return {
        "states": [s.value for s in CaseState],
        "terminal_states": sorted(s.value for s in TERMINAL_STATES),
        "events": [e.value for e in WorkflowEvent],
        "transitions": [
            {"from": s.value, "event": e.value, "to": t.value}
            for (s, e), t in sorted(
                _TRANSITIONS.items(), key=lambda kv: (kv[0][0].value, kv[0][1].value)
            )
        ],
        "notes": {
            "critic-flags-found": "lands in decision instead of revise once the single critique cycle is used",
            "record": "reachable only from awaiting_human_auth via human-decision",
        },
    }


# ---------------------------------------------------------------------------
# Guards
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GuardConfig:
    """Escalation guard thresholds. ``appetite`` of None admits every line
    (used to model a baseline with no appetite guard)."""

    escalation_threshold: float = 0.60
    appetite: frozenset[str] | None = frozenset(
        {
            "commercial property",
            "general liability",
            "business owners package",
            "commercial package",
            "habitational",
            "retail",
            "office",
            "restaurant",
            "light manufacturing",
        }
    )
    boundary_check: bool = True
    schema_retries: int = 1


@dataclass(frozen=True)
class GuardOutcome:
    passed: bool
    reason: GuardReason
    detail: str = ""

    def __post_init__(self):
        if (self.reason is GuardReason.CLEAN) != self.passed:
            raise ValueError("reason must be Clean exactly when passed")

    def to_dict(self) -> dict[str, Any]:
        return {"passed": self.passed, "reason": self.reason.value, "detail": self.detail}


def evaluate_guards(case: WorkflowCase, draft: DraftDecision, config: GuardConfig,
                    submission: Submission | None = None) -> GuardOutcome:
    """Total over schema-valid drafts. Any non-Clean outcome makes the
    caller take the Escalated transition."""
    if draft.confidence < config.escalation_threshold:
        return GuardOutcome(
            passed=False,
            reason=GuardReason.LOW_CONFIDENCE,
            detail=f"confidence {draft.confidence:.2f} below threshold {config.escalation_threshold:.2f}",
        )
    line = submission.line_of_business if submission is not None else case.line_of_business
    if config.appetite is not None and line.lower() not in config.appetite:
        return GuardOutcome(
            passed=False,
            reason=GuardReason.OUT_OF_APPETITE,
            detail=f"line of business {line!r} absent from appetite registry",
        )
    if config.boundary_check:
        report = detect_boundary_violation(draft)
        if report.violation:
            return GuardOutcome(
                passed=False,
                reason=GuardReason.BOUNDARY_VIOLATION,
                detail=f"{report.pattern_class.value}: {'; '.join(report.matches)}",
            )
    return GuardOutcome(passed=True, reason=GuardReason.CLEAN)


# ---------------------------------------------------------------------------
# Engine
# ---------------------------------------------------------------------------

@dataclass
class CaseArtifacts:
    """Everything produced while running one case, keyed for the audit trail."""

    drafts: dict[str, DraftDecision] = field(default_factory=dict)
    critiques: dict[str, Any] = field(default_factory=dict)
    guard_outcomes: list[GuardOutcome] = field(default_factory=list)
    retrieved_chunks: list[str] = field(default_factory=list)
    tool_results: dict[str, str] = field(default_factory=dict)
    tokens: list[tuple[int, int]] = field(default_factory=list)


class Engine:
    """Drives cases through the pipeline. Distinct cases may progress
    concurrently; per-case transition application is serialized through a
    per-case exclusive section."""

    def __init__(
        self,
        gateway: gw.AgentGateway,
        tools: ToolRegistry,
        ledger: AuditLedger,
        store: RetrievalStore,
        config: GuardConfig | None = None,
        clock: Callable[[], str] | None = None,
        retrieval_k: int = 4,
    ):
        self.gateway = gateway
        self.tools = tools
        self.ledger = ledger
        self.retrieval_store = store
        self.config = config or GuardConfig()
        self.clock = clock or _now
        self.retrieval_k = retrieval_k
        self.cases: dict[str, WorkflowCase] = {}
        self.submissions: dict[str, Submission] = {}
        self.artifacts: dict[str, CaseArtifacts] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def case_lock(self, case_id: str) -> threading.Lock:
        with self._locks_guard:
            if case_id not in self._locks:
                self._locks[case_id] = threading.Lock()
            return self._locks[case_id]

    # -- case lifecycle -----------------------------------------------------

    def ingest(self, submission: Submission, case_id: str | None = None) -> WorkflowCase:
        case_id = case_id or submission.submission_id
        if case_id in self.cases:
            raise ValueError(f"case {case_id!r} already exists")
        case = WorkflowCase(
            case_id=case_id,
            submission_ref=submission.submission_id,
            line_of_business=submission.line_of_business,
            tier=submission.tier.value,
            submitted_at=self.clock(),
        )
        self.cases[case_id] = case
        self.submissions[case_id] = submission
        self.artifacts[case_id] = CaseArtifacts()
        self.ledger.append(
            EventKind.INGESTED,
            {
                "submission_id": submission.submission_id,
                "line_of_business": submission.line_of_business,
                "tier": submission.tier.value,
                "documents": len(submission.documents),
            },
            case_id=case_id,
        )
        return case

    def _advance(self, case: WorkflowCase, event: WorkflowEvent, detail: str = "") -> WorkflowCase:
        updated = advance(case, event, detail=detail, now=self.clock())
        self.cases[case.case_id] = updated
        return updated

    def _escalate(self, case: WorkflowCase, reason: str, detail: str) -> WorkflowCase:
        self.ledger.append(
            EventKind.ESCALATION,
            {"reason": reason, "detail": detail},
            case_id=case.case_id,
        )
        return self._advance(case, WorkflowEvent.ESCALATE, detail=f"{reason}: {detail}")

    def _retrieve(self, case: WorkflowCase, submission: Submission) -> list[GuidelineChunk]:
        terms = [submission.line_of_business, submission.tier.value]
        terms += [str(v) for _, v in sorted(submission.structured_fields.items())]
        query = " ".join(terms)
        results, invocation_id = self.tools.invoke(
            "guideline_search",
            {"query": query, "k": self.retrieval_k},
            case_id=case.case_id,
        )
        art = self.artifacts[case.case_id]
        art.tool_results[invocation_id] = str(results)
        chunks = []
        for entry in results:
            chunk = self.retrieval_store.get(entry["chunk_id"])
            if chunk is not None:
                chunks.append(chunk)
                art.retrieved_chunks.append(chunk.chunk_id)
        return chunks

    def _attempt_hook(self, case_id: str, purpose: str):
        art = self.artifacts[case_id]

        def hook(attempt: int, error: SchemaViolation | None, response: gw.BackendResponse):
            art.tokens.append((response.input_tokens, response.output_tokens))
            payload: dict[str, Any] = {
                "role": "critic" if purpose == "critique" else "agent",
                "purpose": purpose,
                "attempt": attempt,
                "valid": error is None,
                "tokens": {"input": response.input_tokens, "output": response.output_tokens},
            }
            if error is not None:
                payload["error"] = {"code": error.code, "message": error.message}
            self.ledger.append(EventKind.AGENT_OUTPUT, payload, case_id=case_id)

        return hook

    def _guard_step(self, case: WorkflowCase, draft: DraftDecision,
                    submission: Submission) -> GuardOutcome:
        outcome = evaluate_guards(case, draft, self.config, submission)
        self.artifacts[case.case_id].guard_outcomes.append(outcome)
        self.ledger.append(EventKind.GUARD_EVALUATED, outcome.to_dict(), case_id=case.case_id)
        return outcome

    def _store_draft(self, case: WorkflowCase, draft: DraftDecision) -> tuple[WorkflowCase, str]:
        art = self.artifacts[case.case_id]
        draft_id = f"{case.case_id}:d{len(art.drafts) + 1}"
        art.drafts[draft_id] = draft
        updated = replace(case, draft_history=case.draft_history + (draft_id,))
        self.cases[case.case_id] = updated
        return updated, draft_id

    def _store_critique(self, case: WorkflowCase, critique) -> tuple[WorkflowCase, str]:
        art = self.artifacts[case.case_id]
        critique_id = f"{case.case_id}:c{len(art.critiques) + 1}"
        art.critiques[critique_id] = critique
        updated = replace(case, critique_history=case.critique_history + (critique_id,))
        self.cases[case.case_id] = updated
        return updated, critique_id

    def run_case(self, submission: Submission, case_id: str | None = None) -> WorkflowCase:
        """Drive a case until AwaitingHumanAuth or Escalated. Never reaches
        Record: that transition requires an externally supplied human
        decision through the governance gate."""
        case = self.ingest(submission, case_id)
        with self.case_lock(case.case_id):
            return self._run_ingested(case, submission)

    def _run_ingested(self, case: WorkflowCase, submission: Submission) -> WorkflowCase:
        case = self._advance(case, WorkflowEvent.INGEST_COMPLETE)
        chunks = self._retrieve(case, submission)

        # Analyze: produce the initial draft (one retry on schema failure).
        try:
            draft = self.gateway.generate_draft(
                submission, chunks, on_attempt=self._attempt_hook(case.case_id, "draft")
            )
        except gw.NonConvergent as exc:
            return self._escalate(case, GuardReason.NON_CONVERGENT.value,
                                  f"draft failed validation {len(exc.violations)} times")
        except gw.BackendUnavailable as exc:
            return self._escalate(case, "BackendUnavailable", str(exc))

        case, draft_id = self._store_draft(case, draft)
        self.ledger.append(
            EventKind.AGENT_OUTPUT,
            {"role": "agent", "purpose": "draft-accepted", "draft_id": draft_id,
             "draft": draft.to_dict()},
            case_id=case.case_id,
        )
        outcome = self._guard_step(case, draft, submission)
        if not outcome.passed:
            return self._escalate(case, outcome.reason.value, outcome.detail)
        case = self._advance(case, WorkflowEvent.DRAFT_PRODUCED)

        # Critique.
        try:
            critique = self.gateway.generate_critique(
                draft, submission, chunks, on_attempt=self._attempt_hook(case.case_id, "critique")
            )
        except gw.NonConvergent as exc:
            return self._escalate(case, GuardReason.NON_CONVERGENT.value,
                                  f"critique failed validation {len(exc.violations)} times")
        except gw.BackendUnavailable as exc:
            return self._escalate(case, "BackendUnavailable", str(exc))

        case, critique_id = self._store_critique(case, critique)
        self.ledger.append(
            EventKind.CRITIQUE_ISSUED,
            {"critique_id": critique_id, "verdict": critique.verdict.value,
             "n_flags": len(critique.flags), "critique": critique.to_dict()},
            case_id=case.case_id,
        )

        if critique.verdict is Verdict.CLEAN:
            case = self._advance(case, WorkflowEvent.CRITIC_CLEAN)
        else:
            case = self._advance(case, WorkflowEvent.CRITIC_FLAGS_FOUND,
                                 detail=f"{len(critique.flags)} flags")
            try:
                revised = self.gateway.revise_draft(
                    draft, critique, submission, chunks,
                    on_attempt=self._attempt_hook(case.case_id, "revision"),
                )
            except gw.NonConvergent as exc:
                return self._escalate(case, GuardReason.NON_CONVERGENT.value,
                                      f"revision failed validation {len(exc.violations)} times")
            except gw.BackendUnavailable as exc:
                return self._escalate(case, "BackendUnavailable", str(exc))
            case, revised_id = self._store_draft(case, revised)
            self.ledger.append(
                EventKind.REVISION,
                {"draft_id": revised_id, "draft": revised.to_dict()},
                case_id=case.case_id,
            )
            outcome = self._guard_step(case, revised, submission)
            if not outcome.passed:
                return self._escalate(case, outcome.reason.value, outcome.detail)
            case = self._advance(case, WorkflowEvent.REVISION_PRODUCED)

        case = self._advance(case, WorkflowEvent.RECOMMENDATION_FINALIZED)
        return case

    # -- artifact access ----------------------------------------------------

    def current_draft(self, case_id: str) -> DraftDecision | None:
        case = self.cases.get(case_id)
        if case is None or not case.draft_history:
            return None
        return self.artifacts[case_id].drafts[case.draft_history[-1]]

    def apply_decision(self, case_id: str, decision, token: str | None = None):
        """Serialize a human decision through the per-case exclusive section;
        the governance gate does the actual authorization."""
        from .governance.authority import authorize

        with self.case_lock(case_id):
            case = self.cases[case_id]
            outcome = authorize(case, decision, self.ledger,
                                draft=self.current_draft(case_id), token=token,
                                clock=self.clock)
            self.cases[case_id] = outcome.case
            return outcome

    def resolve_escalation(self, case_id: str, reviewer_id: str, close: bool = False) -> WorkflowCase:
        """Human resolution of an escalated case: back into the authorization
        queue, or terminally closed."""
        if not reviewer_id.strip():
            raise ValueError("resolution requires a reviewer identity")
        with self.case_lock(case_id):
            case = self.cases[case_id]
            event = WorkflowEvent.HUMAN_CLOSED if close else WorkflowEvent.HUMAN_RESOLVED
            updated = self._advance(case, event, detail=reviewer_id)
            self.ledger.append(
                EventKind.ESCALATION,
                {"reason": "human-resolution", "action": event.value, "reviewer_id": reviewer_id},
                case_id=case_id,
            )
            return updated


def run_case(submission: Submission, agents: gw.AgentGateway, tools: ToolRegistry,
             ledger: AuditLedger, store: RetrievalStore | None = None,
             config: GuardConfig | None = None) -> WorkflowCase:
    """One-shot pipeline run over an ephemeral engine."""
    if store is None:
        store = RetrievalStore.from_fixture()
    engine = Engine(agents, tools, ledger, store, config=config)
    return engine.run_case(submission)


def crosscheck_ledger(case: WorkflowCase, ledger: AuditLedger) -> list[str]:
    """Cross-check the ledger against the case's transition log: every agent
    output, tool call, critique, guard evaluation, and pipeline transition
    must appear exactly once. Returns discrepancies."""
    problems = []
    events = [r for r in ledger.records if r.case_id == case.case_id]
    counts: dict[str, int] = {}
    for record in events:
        counts[record.event_kind] = counts.get(record.event_kind, 0) + 1

    transitions = {e: 0 for e in WorkflowEvent}
    for entry in case.transition_log:
        transitions[entry.event] += 1

    if counts.get(EventKind.INGESTED.value, 0) != 1:
        problems.append("expected exactly one Ingested event")
    accepted_drafts = sum(
        1 for r in events
        if r.event_kind == EventKind.AGENT_OUTPUT.value
        and r.payload.get("purpose") == "draft-accepted"
    )
    if accepted_drafts != len(case.draft_history) - transitions[WorkflowEvent.REVISION_PRODUCED]:
        problems.append("accepted draft events do not match draft history")
    critiques = counts.get(EventKind.CRITIQUE_ISSUED.value, 0)
    if critiques != len(case.critique_history):
        problems.append("CritiqueIssued events do not match critique history")
    revisions = counts.get(EventKind.REVISION.value, 0)
    if revisions != transitions[WorkflowEvent.REVISION_PRODUCED]:
        problems.append("Revision events do not match revision transitions")
    escalations = transitions[WorkflowEvent.ESCALATE]
    if counts.get(EventKind.ESCALATION.value, 0) < escalations:
        problems.append("fewer Escalation events than escalate transitions")
    if transitions[WorkflowEvent.HUMAN_DECISION] != counts.get(EventKind.HUMAN_DECISION.value, 0):
        problems.append("HumanDecision events do not match human-decision transitions")
    if transitions[WorkflowEvent.HUMAN_DECISION] != counts.get(EventKind.RECORDED.value, 0):
        problems.append("Recorded events do not match human-decision transitions")
    return problems


def check_case_invariants(case: WorkflowCase) -> list[str]:
    """Structural invariants every case must satisfy; returns violations."""
    problems = []
    if case.critique_cycles_used not in (0, 1):
        problems.append(f"critique_cycles_used = {case.critique_cycles_used}")
    timestamps = [e.timestamp for e in case.transition_log]
    if timestamps != sorted(timestamps):
        problems.append("transition_log is not time-ordered")
    if case.state in {CaseState.DECISION, CaseState.AWAITING_HUMAN_AUTH, CaseState.RECORD}:
        if not case.passed_through(CaseState.ESCALATED):
            expected = 1 + case.critique_cycles_used
            if len(case.draft_history) != expected:
                problems.append(
                    f"draft_history length {len(case.draft_history)} != {expected}"
                )
    for i, entry in enumerate(case.transition_log):
        if entry.to_state is CaseState.RECORD:
            if entry.from_state is not CaseState.AWAITING_HUMAN_AUTH:
                problems.append("record entered from a state other than awaiting_human_auth")
            if entry.event is not WorkflowEvent.HUMAN_DECISION or not entry.detail.strip():
                problems.append("record entered without a reviewer-carrying human decision")
        if i > 0 and entry.from_state is not case.transition_log[i - 1].to_state:
            problems.append(f"transition_log discontinuity at index {i}")
    return problems
