import random
from collections import deque

import pytest

from uwflow.engine import (
    CYCLE_EXHAUSTED_DETAIL,
    CaseState,
    Engine,
    GuardConfig,
    GuardOutcome,
    GuardReason,
    IllegalTransition,
    TERMINAL_STATES,
    WorkflowCase,
    WorkflowEvent,
    advance,
    check_case_invariants,
    crosscheck_ledger,
    evaluate_guards,
    legal_events,
    replay,
    run_case,
    transition_table_json,
)
from uwflow.gateway import fixture_gateway, validate_draft
from uwflow.governance.ledger import AuditLedger, EventKind
from uwflow.knowledge import RetrievalStore, build_default_registry
from uwflow.scenario_fixtures import fixture_submission


def fresh_case(**overrides):
    base = dict(case_id="c1", submission_ref="s1", line_of_business="office")
    base.update(overrides)
    return WorkflowCase(**base)


def pipeline(scenario: str, config: GuardConfig | None = None):
    store = RetrievalStore.from_fixture()
    ledger = AuditLedger()
    engine = Engine(fixture_gateway(), build_default_registry(store, ledger),
                    ledger, store, config=config)
    case = engine.run_case(fixture_submission(scenario))
    return engine, case, ledger


class TestAdvance:
    def test_critic_clean_skips_revision(self):
        case = fresh_case(state=CaseState.CRITIQUE)
        after = advance(case, WorkflowEvent.CRITIC_CLEAN)
        assert after.state is CaseState.DECISION
        assert after.critique_cycles_used == 0

    def test_record_is_terminal(self):
        case = fresh_case(state=CaseState.RECORD)
        for event in WorkflowEvent:
            with pytest.raises(IllegalTransition):
                advance(case, event, detail="u1")

    def test_flags_after_completed_cycle_proceed_to_decision(self):
        case = fresh_case(state=CaseState.REVISE, critique_cycles_used=1)
        after = advance(case, WorkflowEvent.CRITIC_FLAGS_FOUND)
        assert after.state is CaseState.DECISION
        assert after.critique_cycles_used == 1
        assert CYCLE_EXHAUSTED_DETAIL in after.transition_log[-1].detail

    def test_flags_in_critique_with_spent_budget_also_proceed(self):
        case = fresh_case(state=CaseState.CRITIQUE, critique_cycles_used=1)
        after = advance(case, WorkflowEvent.CRITIC_FLAGS_FOUND)
        assert after.state is CaseState.DECISION
        assert after.critique_cycles_used == 1

    def test_human_decision_requires_reviewer_detail(self):
        case = fresh_case(state=CaseState.AWAITING_HUMAN_AUTH)
        with pytest.raises(IllegalTransition):
            advance(case, WorkflowEvent.HUMAN_DECISION)
        after = advance(case, WorkflowEvent.HUMAN_DECISION, detail="uw-1")
        assert after.state is CaseState.RECORD

    def test_advance_is_pure(self):
        case = fresh_case(state=CaseState.CRITIQUE)
        advance(case, WorkflowEvent.CRITIC_CLEAN)
        assert case.state is CaseState.CRITIQUE
        assert case.transition_log == ()

    def test_escalated_resolves_to_auth_or_closed_only(self):
        case = fresh_case(state=CaseState.ESCALATED)
        assert advance(case, WorkflowEvent.HUMAN_RESOLVED).state is CaseState.AWAITING_HUMAN_AUTH
        assert advance(case, WorkflowEvent.HUMAN_CLOSED).state is CaseState.CLOSED
        with pytest.raises(IllegalTransition):
            advance(case, WorkflowEvent.DRAFT_PRODUCED)


class TestModelChecks:
    def test_every_non_terminal_state_can_escalate(self):
        for state in CaseState:
            if state in TERMINAL_STATES:
                assert WorkflowEvent.ESCALATE not in legal_events(state)
            else:
                assert WorkflowEvent.ESCALATE in legal_events(state)

    def test_exhaustive_search_proves_cycle_cap(self):
        """BFS over the abstract (state, cycles) space across every legal
        event: no reachable configuration exceeds one critique cycle, and no
        path enters Record except from AwaitingHumanAuth via human-decision."""
        start = (CaseState.INGEST, 0)
        seen = {start}
        queue = deque([start])
        transitions_taken = 0
        while queue:
            state, cycles = queue.popleft()
            for event in legal_events(state):
                case = fresh_case(state=state, critique_cycles_used=cycles)
                try:
                    after = advance(case, event, detail="fuzz-reviewer")
                except IllegalTransition:
                    continue
                transitions_taken += 1
                assert after.critique_cycles_used <= 1, (state, cycles, event)
                if after.state is CaseState.RECORD:
                    assert state is CaseState.AWAITING_HUMAN_AUTH
                    assert event is WorkflowEvent.HUMAN_DECISION
                node = (after.state, after.critique_cycles_used)
                if node not in seen:
                    seen.add(node)
                    queue.append(node)
        # Every pipeline state is reachable in the abstraction.
        assert {s for s, _ in seen} == set(CaseState)
        assert transitions_taken > 0

    def test_replay_reproduces_terminal_state(self):
        rng = random.Random(11)
        for _ in range(200):
            case = fresh_case()
            for _ in range(rng.randrange(1, 12)):
                events = legal_events(case.state)
                if not events:
                    break
                event = rng.choice(events)
                case = advance(case, event, detail="r1")
            replayed = replay(case)
            assert replayed.state is case.state
            assert replayed.critique_cycles_used == case.critique_cycles_used
            assert [e.event for e in replayed.transition_log] == [
                e.event for e in case.transition_log
            ]

    def test_transition_table_export_is_complete(self):
        table = transition_table_json()
        assert set(table["states"]) == {s.value for s in CaseState}
        assert table["terminal_states"] == sorted(s.value for s in TERMINAL_STATES)
        froms = {(t["from"], t["event"]) for t in table["transitions"]}
        assert ("awaiting_human_auth", "human-decision") in froms
        assert ("record", "escalate") not in froms
        targets_of_record = {t["from"] for t in table["transitions"] if t["to"] == "record"}
        assert targets_of_record == {"awaiting_human_auth"}


class TestGuards:
    def test_all_clean(self):
        draft = validate_draft(_draft_payload(confidence=0.95))
        outcome = evaluate_guards(fresh_case(), draft, GuardConfig())
        assert outcome.passed and outcome.reason is GuardReason.CLEAN

    def test_low_confidence_threshold(self):
        draft = validate_draft(_draft_payload(confidence=0.40))
        outcome = evaluate_guards(fresh_case(), draft, GuardConfig(escalation_threshold=0.60))
        assert not outcome.passed
        assert outcome.reason is GuardReason.LOW_CONFIDENCE

    def test_out_of_appetite(self):
        draft = validate_draft(_draft_payload(confidence=0.95))
        case = fresh_case(line_of_business="marine cargo")
        outcome = evaluate_guards(case, draft, GuardConfig())
        assert outcome.reason is GuardReason.OUT_OF_APPETITE

    def test_permissive_appetite_admits_everything(self):
        draft = validate_draft(_draft_payload(confidence=0.95))
        case = fresh_case(line_of_business="marine cargo")
        outcome = evaluate_guards(case, draft, GuardConfig(appetite=None))
        assert outcome.passed

    def test_guard_outcome_invariant(self):
        with pytest.raises(ValueError):
            GuardOutcome(passed=True, reason=GuardReason.LOW_CONFIDENCE)
        with pytest.raises(ValueError):
            GuardOutcome(passed=False, reason=GuardReason.CLEAN)


class TestRunCase:
    def test_clean_path(self):
        engine, case, ledger = pipeline("clean-renewal")
        assert case.state is CaseState.AWAITING_HUMAN_AUTH
        assert case.critique_cycles_used == 0
        assert len(case.draft_history) == 1
        assert check_case_invariants(case) == []
        assert crosscheck_ledger(case, ledger) == []

    def test_case_a_revision_path(self):
        engine, case, ledger = pipeline("case-A-wiring")
        assert case.state is CaseState.AWAITING_HUMAN_AUTH
        assert case.critique_cycles_used == 1
        assert len(case.draft_history) == 2
        revised = engine.current_draft(case.case_id)
        assert any("electrical system update within one year" in c.lower()
                   for c in revised.conditions)
        assert check_case_invariants(case) == []
        assert crosscheck_ledger(case, ledger) == []

    def test_nonconvergent_escalates_with_two_logged_failures(self):
        engine, case, ledger = pipeline("malformed-twice")
        assert case.state is CaseState.ESCALATED
        assert "NonConvergent" in case.last_escalation_detail()
        failures = [
            r for r in ledger.records
            if r.event_kind == EventKind.AGENT_OUTPUT.value and not r.payload.get("valid", True)
        ]
        assert len(failures) == 2
        escalations = [r for r in ledger.records if r.event_kind == EventKind.ESCALATION.value]
        assert len(escalations) == 1

    def test_low_confidence_escalates(self):
        engine, case, _ = pipeline("low-confidence")
        assert case.state is CaseState.ESCALATED
        assert "LowConfidence" in case.last_escalation_detail()

    def test_out_of_appetite_escalates(self):
        engine, case, _ = pipeline("out-of-appetite")
        assert case.state is CaseState.ESCALATED
        assert "OutOfAppetite" in case.last_escalation_detail()

    def test_boundary_violation_escalates(self):
        engine, case, _ = pipeline("boundary-overreach")
        assert case.state is CaseState.ESCALATED
        assert "BoundaryViolation" in case.last_escalation_detail()

    def test_run_case_never_reaches_record(self):
        for scenario in ("clean-renewal", "case-A-wiring", "case-B-liquor",
                         "hallucinated-alarm", "malformed-twice"):
            _, case, _ = pipeline(scenario)
            assert case.state in (CaseState.AWAITING_HUMAN_AUTH, CaseState.ESCALATED)

    def test_module_level_run_case(self):
        store = RetrievalStore.from_fixture()
        ledger = AuditLedger()
        case = run_case(fixture_submission("clean-renewal"), fixture_gateway(),
                        build_default_registry(store, ledger), ledger, store=store)
        assert case.state is CaseState.AWAITING_HUMAN_AUTH

    def test_retrieval_is_ledgered_as_tool_call(self):
        _, case, ledger = pipeline("clean-renewal")
        invokes = [
            r for r in ledger.records
            if r.event_kind == EventKind.TOOL_CALL.value
            and r.payload.get("action") == "invoke"
            and r.case_id == case.case_id
        ]
        assert len(invokes) == 1
        assert invokes[0].payload["tool"] == "guideline_search"


def _draft_payload(confidence: float):
    return {
        "recommendation": "bind",
        "conditions": [],
        "premium_estimate": 100.0,
        "supporting_facts": [],
        "flags": [],
        "confidence": confidence,
        "reasoning_chain": [],
    }
