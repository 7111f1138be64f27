import pytest

from uwflow.gateway import validate_draft
from uwflow.governance.boundary import BoundaryPattern, detect_boundary_violation, scan_text


def draft_with_text(text, recommendation="bind"):
    return validate_draft({
        "recommendation": recommendation,
        "conditions": [],
        "premium_estimate": None,
        "supporting_facts": [],
        "flags": [text] if text else [],
        "confidence": 0.9,
        "reasoning_chain": [],
    })


class TestPatterns:
    def test_hedged_recommendation_is_clean(self):
        draft = draft_with_text("Recommend binding subject to underwriter approval")
        report = detect_boundary_violation(draft)
        assert not report.violation

    def test_completed_binding_claim_fires(self):
        draft = draft_with_text("Policy has been bound and quote issued to broker")
        report = detect_boundary_violation(draft)
        assert report.violation
        assert report.pattern_class is BoundaryPattern.COMPLETED_BINDING
        assert any("bound" in m.lower() for m in report.matches)

    def test_decline_with_empty_conditions_is_clean(self):
        draft = draft_with_text("", recommendation="decline")
        assert not detect_boundary_violation(draft).violation

    @pytest.mark.parametrize(
        "text,cls",
        [
            ("I have bound the account effective today", BoundaryPattern.COMPLETED_BINDING),
            ("We have issued the binder to the broker", BoundaryPattern.COMPLETED_BINDING),
            ("Coverage is now in force for this location", BoundaryPattern.COMPLETED_BINDING),
            ("Execute the bind in the policy admin system", BoundaryPattern.SYSTEM_IMPERATIVE),
            ("Please issue the policy now", BoundaryPattern.SYSTEM_IMPERATIVE),
            ("Commit the quote to the system of record", BoundaryPattern.SYSTEM_IMPERATIVE),
            ("Quote issued at 4,200 annual premium", BoundaryPattern.QUOTE_ISSUANCE),
            ("The quote was issued yesterday", BoundaryPattern.QUOTE_ISSUANCE),
        ],
    )
    def test_pattern_classes(self, text, cls):
        hits = scan_text(text)
        assert hits, text
        assert cls in {c for c, _ in hits}

    @pytest.mark.parametrize(
        "text",
        [
            "Recommend binding with conditions listed below",
            "Suggest the underwriter issue a quote after review",
            "The account may bind once the inspection clears",
            "Premium computation uses the published base rates",
        ],
    )
    def test_recommendation_language_does_not_fire(self, text):
        assert scan_text(text) == []

    def test_scan_covers_all_text_surfaces(self):
        draft = validate_draft({
            "recommendation": "bind",
            "conditions": ["Quote issued to broker already"],
            "premium_estimate": None,
            "supporting_facts": [],
            "flags": [],
            "confidence": 0.9,
            "reasoning_chain": [{"label": "premium_computation",
                                 "detail": "we have bound this before computing"}],
        })
        report = detect_boundary_violation(draft)
        assert report.violation
        # completed-binding takes precedence in the fixed class order
        assert report.pattern_class is BoundaryPattern.COMPLETED_BINDING
