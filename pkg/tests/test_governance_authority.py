import pytest

from uwflow.engine import CaseState, Engine, WorkflowEvent
from uwflow.gateway import fixture_gateway
from uwflow.governance.authority import (
    CaseMismatch,
    HumanAction,
    HumanDecision,
    MissingReviewer,
    StaleCase,
    WrongState,
    authorize,
    concurrency_token,
)
from uwflow.governance.ledger import AuditLedger, EventKind
from uwflow.knowledge import RetrievalStore, build_default_registry
from uwflow.scenario_fixtures import fixture_submission


@pytest.fixture()
def ready():
    store = RetrievalStore.from_fixture()
    ledger = AuditLedger()
    engine = Engine(fixture_gateway(), build_default_registry(store, ledger), ledger, store)
    case = engine.run_case(fixture_submission("clean-renewal"))
    assert case.state is CaseState.AWAITING_HUMAN_AUTH
    return engine, case, ledger


def decision(case_id, action=HumanAction.ACCEPT, reviewer="uw-7", **kw):
    return HumanDecision(case_id=case_id, action=action, reviewer_id=reviewer, **kw)


class TestAuthorize:
    def test_accept_records_and_copies_recommendation_verbatim(self, ready):
        engine, case, ledger = ready
        draft = engine.current_draft(case.case_id)
        outcome = authorize(case, decision(case.case_id), ledger, draft=draft)
        assert outcome.recorded
        assert outcome.case.state is CaseState.RECORD
        assert outcome.final_recommendation == draft.to_dict()
        kinds = [r.event_kind for r in ledger.for_case(case.case_id)]
        assert kinds[-2:] == [EventKind.HUMAN_DECISION.value, EventKind.RECORDED.value]

    def test_wrong_state(self, ready):
        engine, case, ledger = ready
        analyzing = case
        # Build a case stuck mid-pipeline by replaying the ingest prefix.
        from uwflow.engine import WorkflowCase, advance

        mid = WorkflowCase(case_id="c-mid", submission_ref="s", line_of_business="office")
        mid = advance(mid, WorkflowEvent.INGEST_COMPLETE)
        with pytest.raises(WrongState):
            authorize(mid, decision("c-mid"), ledger)

    def test_case_mismatch(self, ready):
        engine, case, ledger = ready
        with pytest.raises(CaseMismatch):
            authorize(case, decision("other-case"), ledger)

    def test_missing_reviewer(self, ready):
        engine, case, ledger = ready
        with pytest.raises(MissingReviewer):
            authorize(case, decision(case.case_id, reviewer="  "), ledger)

    def test_modify_requires_payload_and_validates_it(self, ready):
        engine, case, ledger = ready
        with pytest.raises(ValueError):
            authorize(case, decision(case.case_id, action=HumanAction.MODIFY), ledger)
        draft = engine.current_draft(case.case_id).to_dict()
        draft["conditions"] = ["inspection within 30 days"]
        draft["recommendation"] = "bind_with_conditions"
        outcome = authorize(
            case,
            decision(case.case_id, action=HumanAction.MODIFY, final_recommendation=draft),
            ledger,
        )
        assert outcome.recorded
        assert outcome.final_recommendation["conditions"] == ["inspection within 30 days"]

    def test_override_payload_must_be_schema_valid(self, ready):
        engine, case, ledger = ready
        bad = engine.current_draft(case.case_id).to_dict()
        bad["execute_bind"] = True
        from uwflow.gateway import SchemaViolation

        with pytest.raises(SchemaViolation):
            authorize(
                case,
                decision(case.case_id, action=HumanAction.OVERRIDE, final_recommendation=bad),
                ledger,
            )

    def test_escalate_action_diverts_without_recording(self, ready):
        engine, case, ledger = ready
        outcome = authorize(case, decision(case.case_id, action=HumanAction.ESCALATE), ledger)
        assert not outcome.recorded
        assert outcome.case.state is CaseState.ESCALATED
        kinds = [r.event_kind for r in ledger.for_case(case.case_id)]
        assert EventKind.RECORDED.value not in kinds
        assert EventKind.HUMAN_DECISION.value not in kinds
        assert kinds[-1] == EventKind.ESCALATION.value

    def test_stale_token_loses_the_race(self, ready):
        engine, case, ledger = ready
        token_a = concurrency_token(case)
        token_b = concurrency_token(case)  # two reviewers loaded the same view
        draft = engine.current_draft(case.case_id)
        first = authorize(case, decision(case.case_id, reviewer="uw-a"), ledger,
                          draft=draft, token=token_a)
        assert first.recorded
        with pytest.raises(StaleCase):
            authorize(first.case, decision(case.case_id, reviewer="uw-b"), ledger,
                      draft=draft, token=token_b)
        recorded = [r for r in ledger.for_case(case.case_id)
                    if r.event_kind == EventKind.RECORDED.value]
        assert len(recorded) == 1

    def test_engine_apply_decision_serializes_and_updates(self, ready):
        engine, case, ledger = ready
        outcome = engine.apply_decision(case.case_id, decision(case.case_id),
                                        token=concurrency_token(case))
        assert outcome.recorded
        assert engine.cases[case.case_id].state is CaseState.RECORD


class TestDecisionNegativity:
    def test_recorded_events_match_human_decisions_with_reviewers(self, ready):
        engine, case, ledger = ready
        engine.apply_decision(case.case_id, decision(case.case_id))
        recorded = [r for r in ledger.records if r.event_kind == EventKind.RECORDED.value]
        humans = [r for r in ledger.records if r.event_kind == EventKind.HUMAN_DECISION.value]
        assert len(recorded) == len(humans) == 1
        assert humans[0].payload["reviewer_id"]
        assert recorded[0].seq > humans[0].seq

    def test_no_api_reaches_record_without_human_decision(self, ready):
        engine, case, _ = ready
        from uwflow.engine import IllegalTransition, advance

        for event in WorkflowEvent:
            if event is WorkflowEvent.HUMAN_DECISION:
                continue
            try:
                after = advance(case, event, detail="x")
            except IllegalTransition:
                continue
            assert after.state is not CaseState.RECORD
