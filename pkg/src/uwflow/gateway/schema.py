"""Structured output contract for agent and critic, with strict validation.

The parser rejects unknown fields outright, so the output format cannot
smuggle a binding action: there is no field through which one could be
expressed. Field names that even look like binding verbs get a dedicated
diagnostic. ``validate_output`` is total over arbitrary byte input.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Any

from ..knowledge import Citation, CitationKind

# Field-name tokens that indicate an attempted binding action. Strict
# unknown-field rejection already blocks these; the denylist only upgrades
# the diagnostic.
BINDING_ACTION_TOKENS = frozenset({"bind", "execute", "issue", "commit", "write", "authorize"})

REQUIRED_REASONING_LABELS = (
    "risk_factor_extraction",
    "guideline_compliance_check",
    "premium_computation",
)


class Recommendation(str, Enum):
    BIND = "bind"
    BIND_WITH_CONDITIONS = "bind_with_conditions"
    DECLINE = "decline"
    REFER_TO_HUMAN = "refer_to_human"


class Verdict(str, Enum):
    CLEAN = "clean"
    ISSUES_FOUND = "issues_found"


class FlagCategory(str, Enum):
    FACTUAL_INCONSISTENCY = "factual_inconsistency"
    GUIDELINE_VIOLATION = "guideline_violation"
    UNSUPPORTED_ASSUMPTION = "unsupported_assumption"
    MISSING_RISK_FACTOR = "missing_risk_factor"
    LOGICAL_INCOHERENCE = "logical_incoherence"


class FlagSeverity(str, Enum):
    MINOR = "minor"
    MAJOR = "major"


class SchemaViolation(ValueError):
    """Validation failure with a machine-readable reason code."""

    def __init__(self, code: str, message: str, fieldname: str = ""):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.fieldname = fieldname
        self.message = message


class BindingActionField(SchemaViolation):
    def __init__(self, fieldname: str):
        super().__init__(
            "BindingActionField",
            f"field {fieldname!r} names a binding action; output schema admits none",
            fieldname,
        )


# ---------------------------------------------------------------------------
# Datatypes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SupportedClaim:
    claim_text: str
    citations: tuple[Citation, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "claim_text": self.claim_text,
            "citations": [c.to_dict() for c in self.citations],
        }


@dataclass(frozen=True)
class ReasoningStep:
    label: str
    detail: str

    def to_dict(self) -> dict[str, Any]:
        return {"label": self.label, "detail": self.detail}


@dataclass(frozen=True)
class DraftDecision:
    """Schema-valid agent output. Carries no field that could execute a
    binding action; the validator guarantees it."""

    recommendation: Recommendation
    conditions: tuple[str, ...]
    premium_estimate: float | None
    supporting_facts: tuple[SupportedClaim, ...]
    flags: tuple[str, ...]
    confidence: float
    reasoning_chain: tuple[ReasoningStep, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "recommendation": self.recommendation.value,
            "conditions": list(self.conditions),
            "premium_estimate": self.premium_estimate,
            "supporting_facts": [c.to_dict() for c in self.supporting_facts],
            "flags": list(self.flags),
            "confidence": self.confidence,
            "reasoning_chain": [s.to_dict() for s in self.reasoning_chain],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def claim_refs(self) -> set[str]:
        """Addressable targets a critique flag may point at."""
        refs = {f"supporting_facts[{i}]" for i in range(len(self.supporting_facts))}
        refs |= {f"reasoning_chain[{i}]" for i in range(len(self.reasoning_chain))}
        return refs

    def narrative_texts(self) -> list[str]:
        """All free-text surfaces, for boundary-violation scanning."""
        texts = list(self.conditions) + list(self.flags)
        texts += [c.claim_text for c in self.supporting_facts]
        texts += [s.detail for s in self.reasoning_chain]
        return texts


@dataclass(frozen=True)
class CritiqueFlag:
    category: FlagCategory
    severity: FlagSeverity
    target_claim: str
    evidence: tuple[Citation, ...]
    narrative: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "category": self.category.value,
            "severity": self.severity.value,
            "target_claim": self.target_claim,
            "evidence": [c.to_dict() for c in self.evidence],
            "narrative": self.narrative,
        }


@dataclass(frozen=True)
class CritiqueReport:
    verdict: Verdict
    flags: tuple[CritiqueFlag, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "flags": [f.to_dict() for f in self.flags],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

_DRAFT_FIELDS = {
    "recommendation",
    "conditions",
    "premium_estimate",
    "supporting_facts",
    "flags",
    "confidence",
    "reasoning_chain",
}
_DRAFT_REQUIRED = _DRAFT_FIELDS - {"premium_estimate"}
_CLAIM_FIELDS = {"claim_text", "citations"}
_CITATION_FIELDS = {"kind", "target_id", "span", "quoted_text"}
_STEP_FIELDS = {"label", "detail"}
_CRITIQUE_FIELDS = {"verdict", "flags"}
_FLAG_FIELDS = {"category", "severity", "target_claim", "evidence", "narrative"}


import re as _re

_CAMEL_BOUNDARY = _re.compile(r"(?<=[a-z0-9])(?=[A-Z])")
_NON_WORD = _re.compile(r"[^a-zA-Z0-9]+")


def _name_tokens(name: str) -> set[str]:
    spaced = _CAMEL_BOUNDARY.sub("_", name)
    return {t.lower() for t in _NON_WORD.split(spaced) if t}


def _check_fields(obj: dict[str, Any], allowed: set[str], required: set[str], where: str) -> None:
    for key in obj:
        if not isinstance(key, str):
            raise SchemaViolation("UnknownField", f"non-string key in {where}")
        if key not in allowed:
            if _name_tokens(key) & BINDING_ACTION_TOKENS:
                raise BindingActionField(key)
            raise SchemaViolation("UnknownField", f"unknown field {key!r} in {where}", key)
    for key in required:
        if key not in obj:
            raise SchemaViolation("MissingField", f"missing field {key!r} in {where}", key)


def _require(cond: bool, code: str, message: str, fieldname: str = "") -> None:
    if not cond:
        raise SchemaViolation(code, message, fieldname)


def _parse_citation(obj: Any, where: str) -> Citation:
    _require(isinstance(obj, dict), "WrongType", f"citation in {where} must be an object")
    _check_fields(obj, _CITATION_FIELDS, {"kind", "target_id", "quoted_text"}, where)
    try:
        kind = CitationKind(obj["kind"])
    except (ValueError, TypeError):
        raise SchemaViolation("BadEnum", f"unknown citation kind {obj.get('kind')!r}", "kind") from None
    _require(isinstance(obj["target_id"], str) and bool(obj["target_id"]),
             "WrongType", f"citation target_id in {where} must be a non-empty string", "target_id")
    span = obj.get("span")
    parsed_span: tuple[int, int] | None = None
    if span is not None:
        _require(
            isinstance(span, list) and len(span) == 2
            and all(isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in span)
            and span[0] <= span[1],
            "WrongType",
            f"citation span in {where} must be [start, end] byte offsets",
            "span",
        )
        parsed_span = (span[0], span[1])
    _require(isinstance(obj["quoted_text"], str), "WrongType",
             f"citation quoted_text in {where} must be a string", "quoted_text")
    return Citation(kind=kind, target_id=obj["target_id"], span=parsed_span,
                    quoted_text=obj["quoted_text"])


def _parse_str_list(value: Any, where: str) -> tuple[str, ...]:
    _require(isinstance(value, list), "WrongType", f"{where} must be a list")
    for item in value:
        _require(isinstance(item, str), "WrongType", f"{where} entries must be strings")
    return tuple(value)


def validate_draft(obj: Any) -> DraftDecision:
    """Strict-parse a decoded JSON value as a DraftDecision."""
    _require(isinstance(obj, dict), "NotObject", "draft must be a JSON object")
    _check_fields(obj, _DRAFT_FIELDS, _DRAFT_REQUIRED, "draft")

    try:
        recommendation = Recommendation(obj["recommendation"])
    except (ValueError, TypeError):
        raise SchemaViolation(
            "BadEnum", f"unknown recommendation {obj.get('recommendation')!r}", "recommendation"
        ) from None

    conditions = _parse_str_list(obj["conditions"], "conditions")
    if recommendation is Recommendation.BIND_WITH_CONDITIONS and not conditions:
        raise SchemaViolation(
            "EmptyConditions", "bind_with_conditions requires at least one condition", "conditions"
        )

    premium = obj.get("premium_estimate")
    if premium is not None:
        _require(
            isinstance(premium, (int, float)) and not isinstance(premium, bool) and premium >= 0,
            "WrongType", "premium_estimate must be a non-negative number", "premium_estimate",
        )
        premium = float(premium)

    confidence = obj["confidence"]
    _require(
        isinstance(confidence, (int, float)) and not isinstance(confidence, bool),
        "WrongType", "confidence must be a number", "confidence",
    )
    if not 0.0 <= float(confidence) <= 1.0:
        raise SchemaViolation("RangeViolation", f"confidence {confidence} outside [0, 1]", "confidence")

    _require(isinstance(obj["supporting_facts"], list), "WrongType",
             "supporting_facts must be a list", "supporting_facts")
    claims = []
    for i, entry in enumerate(obj["supporting_facts"]):
        where = f"supporting_facts[{i}]"
        _require(isinstance(entry, dict), "WrongType", f"{where} must be an object")
        _check_fields(entry, _CLAIM_FIELDS, _CLAIM_FIELDS, where)
        _require(isinstance(entry["claim_text"], str) and bool(entry["claim_text"]),
                 "WrongType", f"{where}.claim_text must be a non-empty string")
        _require(isinstance(entry["citations"], list), "WrongType", f"{where}.citations must be a list")
        if not entry["citations"]:
            raise SchemaViolation("MissingCitations", f"{where} carries no citation", where)
        citations = tuple(_parse_citation(c, where) for c in entry["citations"])
        claims.append(SupportedClaim(entry["claim_text"], citations))

    flags = _parse_str_list(obj["flags"], "flags")

    _require(isinstance(obj["reasoning_chain"], list), "WrongType",
             "reasoning_chain must be a list", "reasoning_chain")
    steps = []
    for i, entry in enumerate(obj["reasoning_chain"]):
        where = f"reasoning_chain[{i}]"
        _require(isinstance(entry, dict), "WrongType", f"{where} must be an object")
        _check_fields(entry, _STEP_FIELDS, _STEP_FIELDS, where)
        _require(isinstance(entry["label"], str) and bool(entry["label"]),
                 "WrongType", f"{where}.label must be a non-empty string")
        _require(isinstance(entry["detail"], str), "WrongType", f"{where}.detail must be a string")
        steps.append(ReasoningStep(entry["label"], entry["detail"]))

    return DraftDecision(
        recommendation=recommendation,
        conditions=conditions,
        premium_estimate=premium,
        supporting_facts=tuple(claims),
        flags=flags,
        confidence=float(confidence),
        reasoning_chain=tuple(steps),
    )


def validate_critique(obj: Any, draft: DraftDecision | None = None) -> CritiqueReport:
    """Strict-parse a decoded JSON value as a CritiqueReport.

    When ``draft`` is given, every flag's target_claim must resolve into it.
    """
    _require(isinstance(obj, dict), "NotObject", "critique must be a JSON object")
    _check_fields(obj, _CRITIQUE_FIELDS, _CRITIQUE_FIELDS, "critique")
    try:
        verdict = Verdict(obj["verdict"])
    except (ValueError, TypeError):
        raise SchemaViolation("BadEnum", f"unknown verdict {obj.get('verdict')!r}", "verdict") from None
    _require(isinstance(obj["flags"], list), "WrongType", "flags must be a list", "flags")

    flags = []
    refs = draft.claim_refs() if draft is not None else None
    for i, entry in enumerate(obj["flags"]):
        where = f"flags[{i}]"
        _require(isinstance(entry, dict), "WrongType", f"{where} must be an object")
        _check_fields(entry, _FLAG_FIELDS, _FLAG_FIELDS, where)
        try:
            category = FlagCategory(entry["category"])
            severity = FlagSeverity(entry["severity"])
        except (ValueError, TypeError):
            raise SchemaViolation("BadEnum", f"bad category/severity in {where}") from None
        _require(isinstance(entry["target_claim"], str) and bool(entry["target_claim"]),
                 "WrongType", f"{where}.target_claim must be a non-empty string")
        if refs is not None and entry["target_claim"] not in refs:
            raise SchemaViolation(
                "UnresolvedTarget",
                f"{where}.target_claim {entry['target_claim']!r} not in the criticized draft",
                "target_claim",
            )
        _require(isinstance(entry["evidence"], list), "WrongType", f"{where}.evidence must be a list")
        evidence = tuple(_parse_citation(c, where) for c in entry["evidence"])
        _require(isinstance(entry["narrative"], str), "WrongType", f"{where}.narrative must be a string")
        flags.append(CritiqueFlag(category, severity, entry["target_claim"], evidence,
                                  entry["narrative"]))

    if (verdict is Verdict.CLEAN) != (len(flags) == 0):
        raise SchemaViolation(
            "VerdictFlagsMismatch", "verdict must be clean exactly when flags is empty", "verdict"
        )
    return CritiqueReport(verdict=verdict, flags=tuple(flags))


def validate_output(raw: str | bytes) -> DraftDecision | CritiqueReport:
    """Strict parse of raw backend output. Never crashes on arbitrary input;
    everything unacceptable raises SchemaViolation with a reason code."""
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError:
            raise SchemaViolation("NotJson", "output is not valid UTF-8") from None
    if not isinstance(raw, str):
        raise SchemaViolation("NotJson", "output is not text")
    try:
        obj = json.loads(raw)
    except (json.JSONDecodeError, RecursionError):
        raise SchemaViolation("NotJson", "output is not valid JSON") from None
    if not isinstance(obj, dict):
        raise SchemaViolation("NotObject", "output is not a JSON object")
    if "recommendation" in obj:
        return validate_draft(obj)
    if "verdict" in obj:
        return validate_critique(obj)
    raise SchemaViolation("MissingField", "output is neither a draft nor a critique")


# ---------------------------------------------------------------------------
# Published JSON Schema (draft 2020-12), consumed by the service and the
# reviewer UI.
# ---------------------------------------------------------------------------

def _citation_schema() -> dict[str, Any]:
    return {
        "type": "object",
        "properties": {
            "kind": {"enum": [k.value for k in CitationKind]},
            "target_id": {"type": "string", "minLength": 1},
            "span": {
                "type": ["array", "null"],
                "prefixItems": [
                    {"type": "integer", "minimum": 0},
                    {"type": "integer", "minimum": 0},
                ],
                "minItems": 2,
                "maxItems": 2,
            },
            "quoted_text": {"type": "string"},
        },
        "required": ["kind", "target_id", "quoted_text"],
        "additionalProperties": False,
    }


def draft_decision_json_schema() -> dict[str, Any]:
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "$id": "urn:uwflow:draft-decision",
        "title": "DraftDecision",
        "type": "object",
        "properties": {
            "recommendation": {"enum": [r.value for r in Recommendation]},
            "conditions": {"type": "array", "items": {"type": "string"}},
            "premium_estimate": {"type": ["number", "null"], "minimum": 0},
            "supporting_facts": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {
                        "claim_text": {"type": "string", "minLength": 1},
                        "citations": {
                            "type": "array",
                            "items": _citation_schema(),
                            "minItems": 1,
                        },
                    },
                    "required": ["claim_text", "citations"],
                    "additionalProperties": False,
                },
            },
            "flags": {"type": "array", "items": {"type": "string"}},
            "confidence": {"type": "number", "minimum": 0, "maximum": 1},
            "reasoning_chain": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {
                        "label": {"type": "string", "minLength": 1},
                        "detail": {"type": "string"},
                    },
                    "required": ["label", "detail"],
                    "additionalProperties": False,
                },
            },
        },
        "required": sorted(_DRAFT_REQUIRED),
        "additionalProperties": False,
        "allOf": [
            {
                "if": {"properties": {"recommendation": {"const": "bind_with_conditions"}}},
                "then": {"properties": {"conditions": {"minItems": 1}}},
            }
        ],
    }


def critique_report_json_schema() -> dict[str, Any]:
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "$id": "urn:uwflow:critique-report",
        "title": "CritiqueReport",
        "type": "object",
        "properties": {
            "verdict": {"enum": [v.value for v in Verdict]},
            "flags": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {
                        "category": {"enum": [c.value for c in FlagCategory]},
                        "severity": {"enum": [s.value for s in FlagSeverity]},
                        "target_claim": {"type": "string", "minLength": 1},
                        "evidence": {"type": "array", "items": _citation_schema()},
                        "narrative": {"type": "string"},
                    },
                    "required": ["category", "severity", "target_claim", "evidence", "narrative"],
                    "additionalProperties": False,
                },
            },
        },
        "required": ["verdict", "flags"],
        "additionalProperties": False,
    }
