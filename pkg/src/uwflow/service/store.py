"""File-backed persistence: one JSON file per case plus the shared JSONL
ledger. A narrow interface so a database can slot in later."""

from __future__ import annotations

import json
import os
from typing import Any

from ..engine import (
    CaseState,
    Engine,
    GuardOutcome,
    GuardReason,
    TransitionEntry,
    WorkflowCase,
    WorkflowEvent,
)
from ..gateway.schema import validate_critique, validate_draft
from ..governance.authority import RecordedOutcome
from ..submission import Submission


class CaseStore:
    def __init__(self, data_dir: str):
        self.data_dir = data_dir
        self.cases_dir = os.path.join(data_dir, "cases")
        self.outcomes_dir = os.path.join(data_dir, "outcomes")
        os.makedirs(self.cases_dir, exist_ok=True)
        os.makedirs(self.outcomes_dir, exist_ok=True)

    def ledger_path(self) -> str:
        return os.path.join(self.data_dir, "ledger.jsonl")

    def _case_path(self, case_id: str) -> str:
        safe = "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in case_id)
        return os.path.join(self.cases_dir, f"{safe}.json")

    def save_case(self, engine: Engine, case_id: str,
                  outcome: RecordedOutcome | None = None) -> None:
        case = engine.cases[case_id]
        submission = engine.submissions[case_id]
        art = engine.artifacts[case_id]
        payload: dict[str, Any] = {
            "case": case.to_dict(),
            "submission": submission.to_dict(include_ground_truth=True),
            "drafts": {k: d.to_dict() for k, d in art.drafts.items()},
            "critiques": {k: c.to_dict() for k, c in art.critiques.items()},
            "guard_outcomes": [g.to_dict() for g in art.guard_outcomes],
            "retrieved_chunks": art.retrieved_chunks,
            "tokens": art.tokens,
        }
        if outcome is not None:
            payload["outcome"] = outcome.to_dict()
            payload["outcome_token"] = outcome.token_used
        path = self._case_path(case_id)
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, sort_keys=True)
        os.replace(tmp, path)

    def export_outcome(self, outcome: RecordedOutcome) -> str:
        """Stub system-of-record exporter: writes the recorded outcome file."""
        path = os.path.join(self.outcomes_dir, f"{outcome.case_id}.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(outcome.to_dict(), fh, sort_keys=True, indent=2)
        return path

    def load_into(self, engine: Engine) -> list[str]:
        """Rehydrate persisted cases into a fresh engine; returns case ids."""
        loaded = []
        for name in sorted(os.listdir(self.cases_dir)):
            if not name.endswith(".json"):
                continue
            with open(os.path.join(self.cases_dir, name), "r", encoding="utf-8") as fh:
                payload = json.load(fh)
            case = _case_from_dict(payload["case"])
            engine.cases[case.case_id] = case
            engine.submissions[case.case_id] = Submission.from_dict(payload["submission"])
            from ..engine import CaseArtifacts

            art = CaseArtifacts()
            art.drafts = {k: validate_draft(d) for k, d in payload["drafts"].items()}
            art.critiques = {k: validate_critique(c) for k, c in payload["critiques"].items()}
            art.guard_outcomes = [
                GuardOutcome(passed=g["passed"], reason=GuardReason(g["reason"]),
                             detail=g.get("detail", ""))
                for g in payload["guard_outcomes"]
            ]
            art.retrieved_chunks = payload.get("retrieved_chunks", [])
            art.tokens = [tuple(t) for t in payload.get("tokens", [])]
            engine.artifacts[case.case_id] = art
            loaded.append(case.case_id)
        return loaded


def _case_from_dict(obj: dict[str, Any]) -> WorkflowCase:
    return WorkflowCase(
        case_id=obj["case_id"],
        submission_ref=obj["submission_ref"],
        state=CaseState(obj["state"]),
        critique_cycles_used=int(obj["critique_cycles_used"]),
        draft_history=tuple(obj["draft_history"]),
        critique_history=tuple(obj["critique_history"]),
        transition_log=tuple(
            TransitionEntry(
                from_state=CaseState(e["from_state"]),
                to_state=CaseState(e["to_state"]),
                event=WorkflowEvent(e["event"]),
                timestamp=e["timestamp"],
                detail=e.get("detail", ""),
            )
            for e in obj["transition_log"]
        ),
        line_of_business=obj.get("line_of_business", ""),
        tier=obj.get("tier", "medium"),
        submitted_at=obj.get("submitted_at", ""),
    )
