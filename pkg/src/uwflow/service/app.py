"""HTTP API over the workflow engine.

Every error body is a problem-detail JSON object with a machine-readable
``code``. GETs never change case state; state-changing endpoints append
their ledger events atomically with the state change under the per-case
lock.
"""

from __future__ import annotations

import threading
from typing import Any

from fastapi import FastAPI, Header, Request
from fastapi.responses import JSONResponse

from ..engine import CaseState, Engine, GuardConfig, transition_table_json
from ..gateway import (
    AgentGateway,
    BackendConfig,
    BackendRole,
    FixtureBackend,
    RemoteBackend,
    SchemaViolation,
    critique_report_json_schema,
    draft_decision_json_schema,
)
from ..governance.authority import (
    CaseMismatch,
    HumanAction,
    HumanDecision,
    MissingReviewer,
    RecordedOutcome,
    StaleCase,
    WrongState,
    concurrency_token,
)
from ..governance.ledger import AuditLedger, EventKind, FileLedgerStore
from ..knowledge import (
    QuoteMismatch,
    ResolveError,
    RetrievalStore,
    build_default_registry,
    resolve_citation,
)
from ..submission import MalformedSubmission, Submission
from .config import BackendMode, ServiceConfig
from .store import CaseStore


def problem(status: int, code: str, detail: str) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"type": "about:blank", "title": code, "status": status,
                 "code": code, "detail": detail},
    )


def _build_gateway(config: ServiceConfig) -> AgentGateway:
    if config.backend_mode is BackendMode.REMOTE:
        agent = RemoteBackend(
            BackendConfig(role=BackendRole.AGENT, endpoint=config.remote_endpoint,
                          model_name="remote"),
            credential_env=config.credential_env,
        )
        critic = RemoteBackend(
            BackendConfig(role=BackendRole.CRITIC, endpoint=config.remote_endpoint,
                          model_name="remote"),
            credential_env=config.credential_env,
        )
        return AgentGateway(agent, critic)
    return AgentGateway(
        FixtureBackend(BackendConfig(role=BackendRole.AGENT)),
        FixtureBackend(BackendConfig(role=BackendRole.CRITIC)),
    )


class ServiceState:
    def __init__(self, config: ServiceConfig):
        self.config = config
        self.store = CaseStore(config.data_dir)
        if config.corpus_path:
            import json as _json

            with open(config.corpus_path, "r", encoding="utf-8") as fh:
                self.retrieval = RetrievalStore.from_json(_json.load(fh))
        else:
            self.retrieval = RetrievalStore.from_fixture()
        self.ledger = AuditLedger(FileLedgerStore(self.store.ledger_path()))
        guard = GuardConfig(
            escalation_threshold=config.escalation_threshold,
            appetite=frozenset(a.lower() for a in config.appetite) if config.appetite else GuardConfig().appetite,
        )
        self.engine = Engine(
            _build_gateway(config),
            build_default_registry(self.retrieval, self.ledger),
            self.ledger,
            self.retrieval,
            config=guard,
        )
        self.store.load_into(self.engine)
        self.outcomes: dict[str, RecordedOutcome] = {}
        self.pipeline_lock = threading.Lock()


def _resolve_for_view(svc: ServiceState, case_id: str, citation) -> dict[str, Any]:
    submission = svc.engine.submissions.get(case_id)
    tool_results = svc.engine.artifacts[case_id].tool_results
    entry = citation.to_dict()
    try:
        entry["resolved_text"] = resolve_citation(
            citation, submission, svc.retrieval, tool_results
        )
        entry["resolution"] = "ok"
    except QuoteMismatch as exc:
        entry["resolved_text"] = exc.actual
        entry["resolution"] = "quote_mismatch"
        entry["warning"] = "cited text does not match the source span"
    except ResolveError as exc:
        entry["resolved_text"] = None
        entry["resolution"] = type(exc).__name__
        entry["warning"] = str(exc)
    return entry


def case_view(svc: ServiceState, case_id: str) -> dict[str, Any]:
    engine = svc.engine
    case = engine.cases[case_id]
    art = engine.artifacts[case_id]
    draft = engine.current_draft(case_id)

    submission = engine.submissions[case_id]
    view: dict[str, Any] = {
        "case_id": case_id,
        "state": case.state.value,
        "tier": case.tier,
        "line_of_business": case.line_of_business,
        "submitted_at": case.submitted_at,
        "critique_cycles_used": case.critique_cycles_used,
        "concurrency_token": concurrency_token(case),
        "escalation_reason": case.last_escalation_detail(),
        "guard_outcomes": [g.to_dict() for g in art.guard_outcomes],
        "transition_log": [t.to_dict() for t in case.transition_log],
        "documents": [
            {"doc_id": d.doc_id, "doc_type": d.doc_type, "text": d.text}
            for d in submission.documents
        ],
        "hallucination_warnings": [],
    }
    if draft is not None:
        facts = []
        for claim in draft.supporting_facts:
            resolved = [_resolve_for_view(svc, case_id, c) for c in claim.citations]
            for entry in resolved:
                if entry["resolution"] == "quote_mismatch":
                    view["hallucination_warnings"].append({
                        "claim_text": claim.claim_text,
                        "quoted_text": entry["quoted_text"],
                        "actual_text": entry["resolved_text"],
                    })
            facts.append({"claim_text": claim.claim_text, "citations": resolved})
        view["recommendation"] = draft.to_dict()
        view["supporting_facts_resolved"] = facts
        view["flags"] = list(draft.flags)
        view["unresolved_critique_flags"] = _unresolved_flags(engine, case_id)
    else:
        view["recommendation"] = None
        view["supporting_facts_resolved"] = []
        view["flags"] = []
        view["unresolved_critique_flags"] = _unresolved_flags(engine, case_id)
    view["draft_history"] = [
        engine.artifacts[case_id].drafts[d].to_dict() for d in case.draft_history
    ]
    view["critique_history"] = [
        engine.artifacts[case_id].critiques[c].to_dict() for c in case.critique_history
    ]
    return view


def _unresolved_flags(engine: Engine, case_id: str) -> list[dict[str, Any]]:
    """Critique flags not marked addressed in the latest draft."""
    case = engine.cases[case_id]
    if not case.critique_history:
        return []
    critique = engine.artifacts[case_id].critiques[case.critique_history[-1]]
    draft = engine.current_draft(case_id)
    addressed: set[str] = set()
    if draft is not None:
        for note in draft.flags:
            if note.startswith("addressed: "):
                rest = note[len("addressed: "):]
                addressed.add(rest.split(":", 1)[0].strip())
    out = []
    for flag in critique.flags:
        if flag.category.value not in addressed:
            out.append(flag.to_dict())
    return out


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    svc = ServiceState(config or ServiceConfig())
    app = FastAPI(title="uwflow service", version="0.1.0", openapi_url="/openapi")
    app.state.service = svc

    @app.exception_handler(Exception)
    async def unhandled(request: Request, exc: Exception):
        return problem(500, "InternalError", str(exc))

    @app.get("/health")
    def health():
        return {"status": "ok", "cases": len(svc.engine.cases)}

    @app.get("/workflow/transitions")
    def workflow_transitions():
        return transition_table_json()

    @app.get("/schema/draft-decision")
    def schema_draft():
        return draft_decision_json_schema()

    @app.get("/schema/critique-report")
    def schema_critique():
        return critique_report_json_schema()

    @app.post("/cases", status_code=201)
    async def submit_case(request: Request):
        try:
            payload = await request.json()
        except Exception:
            return problem(400, "NotJson", "request body is not valid JSON")
        try:
            submission = Submission.from_dict(payload)
        except MalformedSubmission as exc:
            return problem(400, "MalformedSubmission", str(exc))
        if submission.submission_id in svc.engine.cases:
            return problem(409, "DuplicateCase",
                           f"case {submission.submission_id!r} already exists")
        with svc.pipeline_lock:
            case = svc.engine.run_case(submission)
        svc.store.save_case(svc.engine, case.case_id)
        return {"case_id": case.case_id, "state": case.state.value}

    @app.get("/cases")
    def list_cases(state: str | None = None):
        # Accept the short form used by the reviewer queue.
        aliases = {"awaiting_auth": CaseState.AWAITING_HUMAN_AUTH.value}
        wanted = aliases.get(state, state) if state else None
        entries = []
        for case_id, case in svc.engine.cases.items():
            if wanted and case.state.value != wanted:
                continue
            art = svc.engine.artifacts[case_id]
            critiques = art.critiques
            flag_count = sum(len(c.flags) for c in critiques.values())
            entries.append({
                "case_id": case_id,
                "state": case.state.value,
                "tier": case.tier,
                "line_of_business": case.line_of_business,
                "submitted_at": case.submitted_at,
                "critique_flag_count": flag_count,
                "escalation_reason": case.last_escalation_detail(),
            })
        if svc.config.escalated_first:
            entries.sort(key=lambda e: (e["state"] != "escalated", e["submitted_at"]))
        else:
            entries.sort(key=lambda e: e["submitted_at"])
        return {"cases": entries}

    @app.get("/cases/{case_id}")
    def get_case(case_id: str):
        if case_id not in svc.engine.cases:
            return problem(404, "UnknownCase", f"no case {case_id!r}")
        return case_view(svc, case_id)

    @app.post("/cases/{case_id}/decision")
    async def decide(case_id: str, request: Request,
                     x_reviewer_id: str | None = Header(default=None)):
        if case_id not in svc.engine.cases:
            return problem(404, "UnknownCase", f"no case {case_id!r}")
        try:
            payload = await request.json()
        except Exception:
            return problem(400, "NotJson", "request body is not valid JSON")
        if not isinstance(payload, dict):
            return problem(400, "NotObject", "request body must be an object")
        reviewer = str(payload.get("reviewer_id") or x_reviewer_id or "")
        token = payload.get("token")
        try:
            action = HumanAction(payload.get("action", ""))
        except ValueError:
            return problem(422, "BadAction", f"unknown action {payload.get('action')!r}")
        decision = HumanDecision(
            case_id=str(payload.get("case_id", case_id)),
            action=action,
            reviewer_id=reviewer,
            final_recommendation=payload.get("final_recommendation"),
            notes=str(payload.get("notes", "")),
        )
        try:
            outcome = svc.engine.apply_decision(case_id, decision, token=token)
        except StaleCase as exc:
            stored = svc.outcomes.get(case_id)
            if (
                stored is not None
                and token is not None
                and token == stored.token_used
                and decision.fingerprint() == stored.decision_fingerprint
            ):
                # Idempotent retry of the already-recorded decision.
                return stored.to_dict()
            return problem(409, "StaleCase", str(exc))
        except WrongState as exc:
            return problem(422, "WrongState", str(exc))
        except CaseMismatch as exc:
            return problem(400, "CaseMismatch", str(exc))
        except MissingReviewer as exc:
            return problem(400, "MissingReviewer", str(exc))
        except SchemaViolation as exc:
            return problem(422, exc.code, exc.message)
        except ValueError as exc:
            return problem(422, "InvalidDecision", str(exc))
        if outcome.recorded:
            svc.outcomes[case_id] = outcome
            svc.store.export_outcome(outcome)
        svc.store.save_case(svc.engine, case_id, outcome=outcome)
        return outcome.to_dict()

    @app.post("/cases/{case_id}/resolve")
    async def resolve(case_id: str, request: Request,
                      x_reviewer_id: str | None = Header(default=None)):
        if case_id not in svc.engine.cases:
            return problem(404, "UnknownCase", f"no case {case_id!r}")
        try:
            payload = await request.json()
        except Exception:
            payload = {}
        reviewer = str((payload or {}).get("reviewer_id") or x_reviewer_id or "")
        close = bool((payload or {}).get("close", False))
        if not reviewer:
            return problem(400, "MissingReviewer", "a reviewer identity is required")
        case = svc.engine.cases[case_id]
        if case.state is not CaseState.ESCALATED:
            return problem(422, "WrongState",
                           f"case is in state {case.state.value!r}, not escalated")
        updated = svc.engine.resolve_escalation(case_id, reviewer, close=close)
        svc.store.save_case(svc.engine, case_id)
        return {"case_id": case_id, "state": updated.state.value}

    @app.post("/cases/{case_id}/chat")
    async def chat(case_id: str, request: Request):
        if case_id not in svc.engine.cases:
            return problem(404, "UnknownCase", f"no case {case_id!r}")
        try:
            payload = await request.json()
        except Exception:
            return problem(400, "NotJson", "request body is not valid JSON")
        question = str((payload or {}).get("question", "")).strip()
        if not question:
            return problem(422, "EmptyQuestion", "a question is required")
        engine = svc.engine
        submission = engine.submissions[case_id]
        draft = engine.current_draft(case_id)
        draft_json = draft.to_json() if draft else "{}"
        before = engine.cases[case_id]
        response = engine.gateway.chat(submission, draft_json, question)
        svc.ledger.append(
            EventKind.AGENT_OUTPUT,
            {"role": "agent", "purpose": "chat", "question": question,
             "answer": response.text,
             "tokens": {"input": response.input_tokens, "output": response.output_tokens}},
            case_id=case_id,
        )
        # Chat can never change case state; assert the contract holds.
        assert engine.cases[case_id] is before
        citations = []
        if draft is not None:
            citations = [
                c.to_dict() for claim in draft.supporting_facts for c in claim.citations
            ]
        return {"answer": response.text, "citations": citations,
                "state": before.state.value}

    @app.get("/cases/{case_id}/audit")
    def audit(case_id: str):
        if case_id not in svc.engine.cases:
            return problem(404, "UnknownCase", f"no case {case_id!r}")
        return svc.ledger.export_case_bundle(case_id)

    return app
