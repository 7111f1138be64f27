"""Natural-language authority-overreach detection.

Schema validation already makes binding *fields* unrepresentable; this pass
catches drafts whose prose asserts a completed binding act, orders a system
of record around, or claims a quote was issued. Pattern classes are fixed
and deterministic so every hit is auditable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from ..gateway.schema import DraftDecision


class BoundaryPattern(str, Enum):
    COMPLETED_BINDING = "completed_binding"
    SYSTEM_IMPERATIVE = "system_imperative"
    QUOTE_ISSUANCE = "quote_issuance"


# Hedged recommendations ("recommend binding subject to approval") must not
# fire; only assertions of completed acts or direct orders to bind/issue do.
_PATTERNS: list[tuple[BoundaryPattern, re.Pattern[str]]] = [
    (
        BoundaryPattern.COMPLETED_BINDING,
        re.compile(
            r"\b(?:i|we)\s+have\s+(?:bound|issued|committed)\b"
            r"|\b(?:policy|coverage|account|quote)\s+(?:has|have)\s+been\s+bound\b"
            r"|\b(?:i|we)\s+(?:bound|executed)\s+(?:the\s+)?(?:policy|coverage|bind)\b"
            r"|\bcoverage\s+is\s+now\s+in\s+force\b"
            r"|\bpolicy\s+(?:is|was)\s+issued\b",
            re.IGNORECASE,
        ),
    ),
    (
        BoundaryPattern.SYSTEM_IMPERATIVE,
        re.compile(
            r"\b(?:execute|perform|run)\s+the\s+bind\b"
            r"|\bissue\s+the\s+(?:policy|quote)\s+now\b"
            r"|\bbind\s+(?:the\s+)?(?:policy|coverage|account)\s+(?:now|immediately)\b"
            r"|\bcommit\s+the\s+quote\s+to\b"
            r"|\bwrite\s+the\s+binder\s+to\b",
            re.IGNORECASE,
        ),
    ),
    (
        BoundaryPattern.QUOTE_ISSUANCE,
        re.compile(
            r"\bquote\s+(?:has\s+been\s+|was\s+)?issued\b"
            r"|\b(?:i|we)\s+(?:have\s+)?issued\s+(?:a|the)\s+quote\b"
            r"|\bbinder\s+(?:has\s+been\s+|was\s+)?(?:sent|issued)\b",
            re.IGNORECASE,
        ),
    ),
]


@dataclass(frozen=True)
class BoundaryReport:
    violation: bool
    pattern_class: BoundaryPattern | None = None
    matches: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "violation": self.violation,
            "pattern_class": self.pattern_class.value if self.pattern_class else None,
            "matches": list(self.matches),
        }


def scan_text(text: str) -> list[tuple[BoundaryPattern, str]]:
    hits = []
    for pattern_class, regex in _PATTERNS:
        for match in regex.finditer(text):
            hits.append((pattern_class, match.group(0)))
    return hits


def detect_boundary_violation(draft: DraftDecision) -> BoundaryReport:
    """Scan every free-text surface of a schema-valid draft. The first
    pattern class in the fixed order (completed binding, system imperative,
    quote issuance) labels the report."""
    all_hits: list[tuple[BoundaryPattern, str]] = []
    for text in draft.narrative_texts():
        all_hits.extend(scan_text(text))
    if not all_hits:
        return BoundaryReport(violation=False)
    for pattern_class, _ in _PATTERNS:
        class_hits = [m for cls, m in all_hits if cls is pattern_class]
        if class_hits:
            return BoundaryReport(
                violation=True,
                pattern_class=pattern_class,
                matches=tuple(dict.fromkeys(m for _, m in all_hits)),
            )
    return BoundaryReport(violation=False)
