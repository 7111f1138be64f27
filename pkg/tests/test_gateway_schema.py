import json

import jsonschema
import pytest
from hypothesis import given, settings, strategies as st

from uwflow.gateway import (
    BindingActionField,
    CritiqueReport,
    DraftDecision,
    SchemaViolation,
    critique_report_json_schema,
    draft_decision_json_schema,
    validate_critique,
    validate_draft,
    validate_output,
)


def minimal_draft(**overrides):
    payload = {
        "recommendation": "bind",
        "conditions": [],
        "premium_estimate": 1200.0,
        "supporting_facts": [
            {
                "claim_text": "clean loss history",
                "citations": [
                    {
                        "kind": "submission_span",
                        "target_id": "app",
                        "span": [0, 10],
                        "quoted_text": "no claims",
                    }
                ],
            }
        ],
        "flags": [],
        "confidence": 0.9,
        "reasoning_chain": [
            {"label": "risk_factor_extraction", "detail": "none found"},
            {"label": "guideline_compliance_check", "detail": "in appetite"},
            {"label": "premium_computation", "detail": "base rate"},
        ],
    }
    payload.update(overrides)
    return payload


def minimal_critique(**overrides):
    payload = {"verdict": "clean", "flags": []}
    payload.update(overrides)
    return payload


class TestDraftValidation:
    def test_minimal_valid_draft_parses(self):
        result = validate_output(json.dumps(minimal_draft()))
        assert isinstance(result, DraftDecision)
        assert result.recommendation.value == "bind"

    def test_issue_policy_field_is_binding_action(self):
        payload = minimal_draft()
        payload["issue_policy"] = True
        with pytest.raises(BindingActionField) as exc_info:
            validate_output(json.dumps(payload))
        assert exc_info.value.code == "BindingActionField"

    def test_execute_bind_field_rejected(self):
        payload = minimal_draft()
        payload["execute_bind"] = True
        with pytest.raises(BindingActionField):
            validate_output(json.dumps(payload))

    @pytest.mark.parametrize("name", ["bind_now", "commitQuote", "write_policy", "authorize"])
    def test_binding_token_variants_rejected(self, name):
        payload = minimal_draft()
        payload[name] = 1
        with pytest.raises(BindingActionField):
            validate_draft(payload)

    def test_plain_unknown_field_rejected(self):
        payload = minimal_draft()
        payload["mood"] = "optimistic"
        with pytest.raises(SchemaViolation) as exc_info:
            validate_draft(payload)
        assert exc_info.value.code == "UnknownField"

    def test_out_of_range_confidence(self):
        with pytest.raises(SchemaViolation) as exc_info:
            validate_draft(minimal_draft(confidence=1.3))
        assert exc_info.value.code == "RangeViolation"

    def test_missing_required_field(self):
        payload = minimal_draft()
        del payload["confidence"]
        with pytest.raises(SchemaViolation) as exc_info:
            validate_draft(payload)
        assert exc_info.value.code == "MissingField"

    def test_conditions_required_for_bind_with_conditions(self):
        payload = minimal_draft(recommendation="bind_with_conditions", conditions=[])
        with pytest.raises(SchemaViolation) as exc_info:
            validate_draft(payload)
        assert exc_info.value.code == "EmptyConditions"

    def test_claim_without_citations_rejected(self):
        payload = minimal_draft()
        payload["supporting_facts"][0]["citations"] = []
        with pytest.raises(SchemaViolation) as exc_info:
            validate_draft(payload)
        assert exc_info.value.code == "MissingCitations"

    def test_boolean_confidence_rejected(self):
        with pytest.raises(SchemaViolation):
            validate_draft(minimal_draft(confidence=True))

    def test_bad_recommendation_enum(self):
        with pytest.raises(SchemaViolation) as exc_info:
            validate_draft(minimal_draft(recommendation="approve"))
        assert exc_info.value.code == "BadEnum"

    def test_premium_may_be_null(self):
        result = validate_draft(minimal_draft(premium_estimate=None))
        assert result.premium_estimate is None


class TestCritiqueValidation:
    def test_clean_critique_parses(self):
        result = validate_output(json.dumps(minimal_critique()))
        assert isinstance(result, CritiqueReport)

    def test_verdict_flags_mismatch(self):
        payload = minimal_critique(verdict="issues_found")
        with pytest.raises(SchemaViolation) as exc_info:
            validate_critique(payload)
        assert exc_info.value.code == "VerdictFlagsMismatch"

    def test_flag_target_must_resolve_into_draft(self):
        draft = validate_draft(minimal_draft())
        payload = {
            "verdict": "issues_found",
            "flags": [
                {
                    "category": "unsupported_assumption",
                    "severity": "minor",
                    "target_claim": "supporting_facts[7]",
                    "evidence": [],
                    "narrative": "no such claim",
                }
            ],
        }
        with pytest.raises(SchemaViolation) as exc_info:
            validate_critique(payload, draft=draft)
        assert exc_info.value.code == "UnresolvedTarget"
        payload["flags"][0]["target_claim"] = "supporting_facts[0]"
        report = validate_critique(payload, draft=draft)
        assert report.flags[0].target_claim == "supporting_facts[0]"


class TestTotalityAndRoundTrip:
    def test_not_json(self):
        with pytest.raises(SchemaViolation) as exc_info:
            validate_output(b"\xff\xfe totally not json")
        assert exc_info.value.code == "NotJson"

    def test_non_object(self):
        with pytest.raises(SchemaViolation) as exc_info:
            validate_output("[1, 2, 3]")
        assert exc_info.value.code == "NotObject"

    def test_neither_draft_nor_critique(self):
        with pytest.raises(SchemaViolation):
            validate_output("{}")

    @given(st.binary(max_size=400))
    @settings(max_examples=300, deadline=None)
    def test_never_crashes_on_arbitrary_bytes(self, raw):
        try:
            validate_output(raw)
        except SchemaViolation:
            pass

    @given(
        st.recursive(
            st.none() | st.booleans() | st.floats(allow_nan=False) | st.text(max_size=8),
            lambda children: st.lists(children, max_size=4)
            | st.dictionaries(st.text(max_size=8), children, max_size=4),
            max_leaves=12,
        )
    )
    @settings(max_examples=200, deadline=None)
    def test_never_crashes_on_arbitrary_json(self, value):
        try:
            validate_output(json.dumps(value))
        except SchemaViolation:
            pass

    def test_round_trip_revalidates(self):
        draft = validate_draft(minimal_draft())
        again = validate_output(draft.to_json())
        assert again == draft
        critique = validate_critique(minimal_critique())
        assert validate_output(critique.to_json()) == critique


class TestPublishedSchema:
    """The hand validator and the published JSON Schema document must agree;
    the jsonschema library is the independent referee."""

    @pytest.fixture()
    def draft_validator(self):
        return jsonschema.Draft202012Validator(draft_decision_json_schema())

    @pytest.mark.parametrize(
        "mutate",
        [
            lambda p: p,
            lambda p: {**p, "confidence": 1.3},
            lambda p: {**p, "recommendation": "approve"},
            lambda p: {**p, "extra": 1},
            lambda p: {**p, "issue_policy": True},
            lambda p: {k: v for k, v in p.items() if k != "flags"},
            lambda p: {**p, "recommendation": "bind_with_conditions", "conditions": []},
            lambda p: {**p, "premium_estimate": None},
        ],
    )
    def test_agreement_on_drafts(self, draft_validator, mutate):
        payload = mutate(minimal_draft())
        schema_ok = draft_validator.is_valid(payload)
        try:
            validate_draft(payload)
            hand_ok = True
        except SchemaViolation:
            hand_ok = False
        assert schema_ok == hand_ok

    def test_critique_schema_accepts_fixture_outputs(self):
        validator = jsonschema.Draft202012Validator(critique_report_json_schema())
        scenarios = json.loads(
            __import__("importlib.resources", fromlist=["files"])
            .files("uwflow.fixtures").joinpath("gateway_scenarios.json").read_text("utf-8")
        )
        checked = 0
        for scenario in scenarios.values():
            if "critique" in scenario and isinstance(scenario["critique"], dict):
                validator.validate(scenario["critique"])
                checked += 1
        assert checked >= 5

    def test_draft_schema_accepts_fixture_outputs(self, draft_validator):
        scenarios = json.loads(
            __import__("importlib.resources", fromlist=["files"])
            .files("uwflow.fixtures").joinpath("gateway_scenarios.json").read_text("utf-8")
        )
        for name, scenario in scenarios.items():
            for key in ("draft", "revision"):
                if key in scenario and isinstance(scenario[key], dict):
                    draft_validator.validate(scenario[key])
