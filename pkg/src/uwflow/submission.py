"""Submission data model: case documents with byte-addressable spans.

Span offsets are UTF-8 byte offsets into the document text, not codepoint
indices. All downstream citation resolution depends on that contract.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any


class Tier(str, Enum):
    SIMPLE = "simple"
    MEDIUM = "medium"
    COMPLEX = "complex"


class MalformedSubmission(ValueError):
    """Raised when a submission payload fails structural validation."""


@dataclass(frozen=True)
class SubmissionDocument:
    """One source document. ``text`` is addressed by UTF-8 byte offsets."""

    doc_id: str
    doc_type: str
    text: str

    def span_text(self, start: int, end: int) -> str:
        """Extract the text at byte span [start, end).

        Raises:
            ValueError: offsets out of range, inverted, or splitting a
                multi-byte character.
        """
        raw = self.text.encode("utf-8")
        if start < 0 or end > len(raw) or start > end:
            raise ValueError(f"span ({start}, {end}) out of range for doc {self.doc_id}")
        try:
            return raw[start:end].decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ValueError(f"span ({start}, {end}) splits a UTF-8 sequence") from exc

    def find_span(self, needle: str) -> tuple[int, int]:
        """Byte span of the first occurrence of ``needle``; raises if absent."""
        raw = self.text.encode("utf-8")
        idx = raw.find(needle.encode("utf-8"))
        if idx < 0:
            raise ValueError(f"text {needle!r} not found in doc {self.doc_id}")
        return idx, idx + len(needle.encode("utf-8"))


@dataclass(frozen=True)
class GroundTruth:
    """Hidden scoring annotation attached to generated cases."""

    decision: str
    risk_factors: frozenset[str] = frozenset()
    planted_defects: frozenset[str] = frozenset()
    notes: str = ""


@dataclass
class Submission:
    """A complete underwriting case as received for ingestion."""

    submission_id: str
    line_of_business: str
    tier: Tier
    documents: list[SubmissionDocument]
    structured_fields: dict[str, Any] = field(default_factory=dict)
    ground_truth: GroundTruth | None = None

    def document(self, doc_id: str) -> SubmissionDocument | None:
        for doc in self.documents:
            if doc.doc_id == doc_id:
                return doc
        return None

    def to_dict(self, include_ground_truth: bool = False) -> dict[str, Any]:
        out: dict[str, Any] = {
            "submission_id": self.submission_id,
            "line_of_business": self.line_of_business,
            "tier": self.tier.value,
            "documents": [
                {"doc_id": d.doc_id, "doc_type": d.doc_type, "text": d.text}
                for d in self.documents
            ],
            "structured_fields": self.structured_fields,
        }
        if include_ground_truth and self.ground_truth is not None:
            gt = self.ground_truth
            out["ground_truth"] = {
                "decision": gt.decision,
                "risk_factors": sorted(gt.risk_factors),
                "planted_defects": sorted(gt.planted_defects),
                "notes": gt.notes,
            }
        return out

    @classmethod
    def from_dict(cls, payload: Any) -> "Submission":
        """Parse and validate an external submission payload."""
        if not isinstance(payload, dict):
            raise MalformedSubmission("submission must be a JSON object")
        for key in ("submission_id", "line_of_business", "documents"):
            if key not in payload:
                raise MalformedSubmission(f"missing required field {key!r}")
        if not isinstance(payload["documents"], list) or not payload["documents"]:
            raise MalformedSubmission("documents must be a non-empty list")
        docs = []
        seen: set[str] = set()
        for entry in payload["documents"]:
            if not isinstance(entry, dict):
                raise MalformedSubmission("each document must be an object")
            for key in ("doc_id", "doc_type", "text"):
                if not isinstance(entry.get(key), str):
                    raise MalformedSubmission(f"document field {key!r} must be a string")
            if entry["doc_id"] in seen:
                raise MalformedSubmission(f"duplicate doc_id {entry['doc_id']!r}")
            seen.add(entry["doc_id"])
            docs.append(SubmissionDocument(entry["doc_id"], entry["doc_type"], entry["text"]))
        tier_raw = payload.get("tier", "medium")
        try:
            tier = Tier(tier_raw)
        except ValueError:
            raise MalformedSubmission(f"unknown tier {tier_raw!r}") from None
        fields = payload.get("structured_fields", {})
        if not isinstance(fields, dict):
            raise MalformedSubmission("structured_fields must be an object")
        gt = None
        if isinstance(payload.get("ground_truth"), dict):
            g = payload["ground_truth"]
            gt = GroundTruth(
                decision=str(g.get("decision", "")),
                risk_factors=frozenset(g.get("risk_factors", [])),
                planted_defects=frozenset(g.get("planted_defects", [])),
                notes=str(g.get("notes", "")),
            )
        return cls(
            submission_id=str(payload["submission_id"]),
            line_of_business=str(payload["line_of_business"]),
            tier=tier,
            documents=docs,
            structured_fields=fields,
            ground_truth=gt,
        )
