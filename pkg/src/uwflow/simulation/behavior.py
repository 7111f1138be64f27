"""Scripted agent and critic behavior parameterized by measured rates.

A behavior model speaks in final-output rates, the way desk-scale
measurements report a whole system configuration. When the critic is in
play, the backend samples
draft-stage defects at rate ``final / (1 - catch * correction)`` so that the
defect surviving to the final draft is again a Bernoulli draw at exactly the
configured rate, and the catch / correction draws stay simple binomials.
All sampling comes from a case-scoped seeded stream, so case runs are
order-independent and reproducible.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Any

from ..gateway.backends import BackendConfig, BackendResponse, BackendRole, BackendUnavailable
from ..submission import Submission
from .scenarios import (
    CONTRADICTION_APP_SENTENCE,
    CONTRADICTION_FACTOR,
    HALLUCINATION_ANCHOR,
    HALLUCINATION_QUOTE,
    RISK_FACTOR_SENTENCES,
    child_rng,
)

_SUBMISSION_ID_RE = re.compile(r"^submission_id: (\S+)$", re.MULTILINE)

_FLAG_CATEGORY = {
    "hallucination": "unsupported_assumption",
    "spurious_factor": "unsupported_assumption",
    "missed_factor": "missing_risk_factor",
    "decision_error": "logical_incoherence",
    "compliance_slip": "guideline_violation",
    "citation_slip": "factual_inconsistency",
    "missed_contradiction": "factual_inconsistency",
}

_FALSE_ALARM_CATEGORIES = ("unsupported_assumption", "guideline_violation", "logical_incoherence")


@dataclass(frozen=True)
class BehaviorModel:
    """Final-output defect rates plus critic dynamics for one system."""

    p_decision_error: dict[str, float]
    p_hallucinate: float
    p_miss_risk_factor: float
    p_spurious_factor: float
    p_compliance_slip: float
    p_citation_slip: float
    p_boundary_overreach: float
    critic_catch_rate: float
    critic_false_alarm_rate: float
    correction_success_rate: float
    evidence_completeness: float
    ood_defer_rate: float
    contradiction_detect_rate: float

    def __post_init__(self):
        values = [
            self.p_hallucinate, self.p_miss_risk_factor, self.p_spurious_factor,
            self.p_compliance_slip, self.p_citation_slip, self.p_boundary_overreach,
            self.critic_catch_rate, self.critic_false_alarm_rate,
            self.correction_success_rate, self.evidence_completeness,
            self.ood_defer_rate, self.contradiction_detect_rate,
            *self.p_decision_error.values(),
        ]
        for v in values:
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"behavior probabilities must lie in [0, 1], got {v}")

    @classmethod
    def from_dict(cls, obj: dict[str, Any]) -> "BehaviorModel":
        return cls(
            p_decision_error={k: float(v) for k, v in obj["p_decision_error"].items()},
            p_hallucinate=float(obj["p_hallucinate"]),
            p_miss_risk_factor=float(obj["p_miss_risk_factor"]),
            p_spurious_factor=float(obj["p_spurious_factor"]),
            p_compliance_slip=float(obj["p_compliance_slip"]),
            p_citation_slip=float(obj.get("p_citation_slip", 0.0)),
            p_boundary_overreach=float(obj["p_boundary_overreach"]),
            critic_catch_rate=float(obj["critic_catch_rate"]),
            critic_false_alarm_rate=float(obj["critic_false_alarm_rate"]),
            correction_success_rate=float(obj["correction_success_rate"]),
            evidence_completeness=float(obj.get("evidence_completeness", 1.0)),
            ood_defer_rate=float(obj.get("ood_defer_rate", 1.0)),
            contradiction_detect_rate=float(obj.get("contradiction_detect_rate", 1.0)),
        )

    def draft_rate(self, final_rate: float, critic_active: bool) -> float:
        """Invert the catch-and-correct cascade: the rate at which the draft
        must carry a defect so it survives to the final output at
        ``final_rate``."""
        if not critic_active or final_rate == 0.0:
            return final_rate
        survive = 1.0 - self.critic_catch_rate * self.correction_success_rate
        if survive <= 0.0:
            return min(1.0, final_rate)
        return min(1.0, final_rate / survive)

    def false_alarm_companion_rate(self) -> float:
        """Per-true-flag probability of emitting one extra false alarm such
        that the false share of all flags recovers the configured rate."""
        fa = self.critic_false_alarm_rate
        if fa >= 1.0:
            return 1.0
        return fa / (1.0 - fa)


@lru_cache(maxsize=1)
def _behavior_fixture() -> dict[str, Any]:
    raw = resources.files("uwflow.fixtures").joinpath("behavior_models.json").read_text("utf-8")
    return json.loads(raw)


def load_behavior_models() -> dict[str, BehaviorModel]:
    """Default models encoding the reference measurement tables."""
    return {
        name: BehaviorModel.from_dict(obj)
        for name, obj in _behavior_fixture().items()
        if not name.startswith("_")
    }


@lru_cache(maxsize=1)
def token_profile() -> dict[str, Any]:
    raw = resources.files("uwflow.fixtures").joinpath("token_profile.json").read_text("utf-8")
    return json.loads(raw)


# ---------------------------------------------------------------------------
# Per-case plan
# ---------------------------------------------------------------------------

@dataclass
class DefectTrace:
    kind: str
    key: str = ""
    flagged: bool = False
    corrected: bool = False

    @property
    def category(self) -> str:
        return _FLAG_CATEGORY[self.kind]


@dataclass
class CasePlan:
    """Everything the scripted backend decided for one case, exposed so the
    scorer can label flags without re-parsing rendered JSON."""

    submission: Submission
    critic_active: bool
    defects: list[DefectTrace] = field(default_factory=list)
    false_alarm_categories: list[str] = field(default_factory=list)
    wrong_decision: str = ""
    ood_case: bool = False
    ood_defer: bool = False
    contradiction_case: bool = False
    contradiction_detected: bool = False
    boundary_overreach: bool = False
    confidence: float = 0.9
    evidence_complete: bool = True
    premium: float = 5000.0
    revision_ran: bool = False

    def find(self, kind: str) -> list[DefectTrace]:
        return [d for d in self.defects if d.kind == kind]

    def has_final(self, kind: str) -> bool:
        return any(not (d.flagged and d.corrected) for d in self.find(kind))

    def missed_final(self) -> set[str]:
        return {
            d.key
            for d in self.defects
            if d.kind in ("missed_factor", "missed_contradiction")
            and not (d.flagged and d.corrected)
        }

    def spurious_final(self) -> set[str]:
        return {
            d.key for d in self.find("spurious_factor") if not (d.flagged and d.corrected)
        }

    def final_decision(self) -> str:
        truth = self.submission.ground_truth.decision
        if self.ood_case:
            return "refer_to_human" if self.ood_defer else self.wrong_decision
        if self.contradiction_case:
            # Detection settles the outcome: found, the recommendation goes
            # contingent (the truth); missed, the draft binds into the conflict.
            return truth if self.contradiction_detected else self.wrong_decision
        errors = self.find("decision_error")
        if errors and not (errors[0].flagged and errors[0].corrected):
            return self.wrong_decision
        return truth


_WRONG_DECISIONS = ["bind", "bind_with_conditions", "decline", "refer_to_human"]


def build_plan(submission: Submission, model: BehaviorModel, seed: int,
               critic_active: bool) -> CasePlan:
    truth = submission.ground_truth
    if truth is None:
        raise BackendUnavailable(f"submission {submission.submission_id} has no ground truth")
    rng = child_rng(seed, "plan", submission.submission_id)
    plan = CasePlan(submission=submission, critic_active=critic_active)
    plan.premium = 1000.0 + rng.randrange(90) * 100.0
    plan.confidence = round(0.70 + rng.random() * 0.28, 4)
    plan.evidence_complete = rng.random() < model.evidence_completeness
    plan.ood_case = "out_of_distribution_line" in truth.planted_defects
    plan.contradiction_case = "contradiction_pair" in truth.planted_defects

    wrong_choices = [d for d in _WRONG_DECISIONS if d != truth.decision]
    plan.wrong_decision = wrong_choices[rng.randrange(len(wrong_choices))]

    if plan.ood_case:
        plan.ood_defer = rng.random() < model.ood_defer_rate
        if plan.ood_defer:
            plan.confidence = 0.65
        # An out-of-appetite case exercises the deferral contract; the usual
        # defect cascade stays out of its way.
        return plan

    def draw(final_rate: float) -> bool:
        return rng.random() < model.draft_rate(final_rate, critic_active)

    tier = submission.tier.value
    if draw(model.p_decision_error.get(tier, 0.0)):
        plan.defects.append(DefectTrace("decision_error"))
    if draw(model.p_hallucinate):
        plan.defects.append(DefectTrace("hallucination"))
    scoreable = sorted(truth.risk_factors - {CONTRADICTION_FACTOR})
    for key in scoreable:
        if draw(model.p_miss_risk_factor):
            plan.defects.append(DefectTrace("missed_factor", key=key))
    if draw(model.p_spurious_factor):
        candidates = sorted(set(RISK_FACTOR_SENTENCES) - truth.risk_factors)
        if candidates:
            plan.defects.append(
                DefectTrace("spurious_factor", key=candidates[rng.randrange(len(candidates))])
            )
    if draw(model.p_compliance_slip):
        plan.defects.append(DefectTrace("compliance_slip"))
    if draw(model.p_citation_slip):
        plan.defects.append(DefectTrace("citation_slip"))
    plan.boundary_overreach = rng.random() < model.p_boundary_overreach

    if plan.contradiction_case:
        plan.contradiction_detected = rng.random() < model.contradiction_detect_rate
        if critic_active:
            # The draft misses the conflict; detection happens as a critic
            # flag whose revision resolves it.
            trace = DefectTrace("missed_contradiction", key=CONTRADICTION_FACTOR)
            if plan.contradiction_detected:
                trace.flagged = True
                trace.corrected = True
            plan.defects.append(trace)

    if critic_active:
        companion = model.false_alarm_companion_rate()
        for defect in plan.defects:
            if defect.kind == "missed_contradiction":
                continue  # detection already decided above
            defect.flagged = rng.random() < model.critic_catch_rate
            if defect.flagged:
                defect.corrected = rng.random() < model.correction_success_rate
        for defect in plan.defects:
            if defect.flagged and rng.random() < companion:
                plan.false_alarm_categories.append(
                    _FALSE_ALARM_CATEGORIES[rng.randrange(len(_FALSE_ALARM_CATEGORIES))]
                )
        plan.revision_ran = any(d.flagged for d in plan.defects) or bool(
            plan.false_alarm_categories
        )
    return plan


# ---------------------------------------------------------------------------
# Rendering plans as backend output
# ---------------------------------------------------------------------------

def _steps(risk: str, compliance: str, premium: str) -> list[dict[str, str]]:
    return [
        {"label": "risk_factor_extraction", "detail": risk},
        {"label": "guideline_compliance_check", "detail": compliance},
        {"label": "premium_computation", "detail": premium},
    ]


def _span_citation(submission: Submission, doc_id: str, needle: str,
                   quoted: str | None = None) -> dict[str, Any]:
    doc = submission.document(doc_id)
    start, end = doc.find_span(needle)
    return {
        "kind": "submission_span",
        "target_id": doc_id,
        "span": [start, end],
        "quoted_text": needle if quoted is None else quoted,
    }


def _factor_claim(submission: Submission, key: str) -> dict[str, Any]:
    sentence = RISK_FACTOR_SENTENCES[key]
    return {
        "claim_text": f"Risk factor {key}: {sentence}",
        "citations": [_span_citation(submission, "app", sentence)],
    }


def _base_claim(submission: Submission) -> dict[str, Any]:
    first_sentence = submission.documents[0].text.split(".")[0] + "."
    return {
        "claim_text": "Account profile as submitted",
        "citations": [_span_citation(submission, "app", first_sentence)],
    }


def _conflict_claim(submission: Submission) -> dict[str, Any]:
    return {
        "claim_text": "Application and menu conflict on liquor service",
        "citations": [
            _span_citation(submission, "app", CONTRADICTION_APP_SENTENCE),
            _span_citation(
                submission, "menu",
                "Full bar with cocktails, craft beers, and an extensive wine list",
            ),
        ],
    }


@dataclass
class _RenderedDraft:
    payload: dict[str, Any]
    claim_index: dict[str, int]


def render_draft(plan: CasePlan) -> _RenderedDraft:
    submission = plan.submission
    truth = submission.ground_truth
    claim_index: dict[str, int] = {}
    claims = [_base_claim(submission)]

    decision = plan.final_decision() if not plan.critic_active else _draft_stage_decision(plan)
    missed_draft = {d.key for d in plan.defects if d.kind == "missed_factor"}
    present = sorted((truth.risk_factors - {CONTRADICTION_FACTOR}) - missed_draft)
    for key in present:
        claim_index[f"factor:{key}"] = len(claims)
        claims.append(_factor_claim(submission, key))

    if plan.contradiction_case and plan.contradiction_detected and not plan.critic_active:
        claim_index["conflict"] = len(claims)
        claims.append(_conflict_claim(submission))

    for defect in plan.defects:
        if defect.kind == "spurious_factor":
            claim_index["spurious"] = len(claims)
            sentence = RISK_FACTOR_SENTENCES[defect.key]
            claims.append({
                "claim_text": f"Risk factor {defect.key}: {sentence}",
                "citations": [
                    _span_citation(submission, "app",
                                   submission.documents[0].text.split(".")[0] + "."),
                ],
            })
        elif defect.kind == "hallucination":
            claim_index["hallucination"] = len(claims)
            claims.append({
                "claim_text": "Premises protected by a monitored alarm system",
                "citations": [
                    _span_citation(submission, "app", HALLUCINATION_ANCHOR,
                                   quoted=HALLUCINATION_QUOTE),
                ],
            })
        elif defect.kind == "citation_slip":
            claim_index["citation_slip"] = len(claims)
            needle = "Requested effective date is the first of next month."
            claims.append({
                "claim_text": "Effective date as requested on the application",
                "citations": [
                    _span_citation(submission, "app", needle,
                                   quoted="Requested effective date is the first of the month."),
                ],
            })

    flags = []
    if plan.boundary_overreach:
        flags.append("Policy has been bound and quote issued to broker per producer request")

    conditions = []
    if decision == "bind_with_conditions":
        if plan.contradiction_case and "conflict" in claim_index:
            conditions = [
                "Binding contingent upon clarification of liquor exposure with the producer",
                "Add liquor liability coverage rated on alcohol receipts if service is confirmed",
            ]
        else:
            conditions = ["Provide current five-year loss runs at or before binding"]

    payload = {
        "recommendation": decision,
        "conditions": conditions,
        "premium_estimate": None if decision in ("decline", "refer_to_human") else plan.premium,
        "supporting_facts": claims,
        "flags": flags,
        "confidence": plan.confidence,
        "reasoning_chain": _steps(
            f"Identified factors: {', '.join(present) if present else 'none beyond profile'}.",
            "Checked stated factors against the retrieved guideline sections.",
            f"Preliminary premium {plan.premium:.0f} from base rates and schedule modifiers.",
        ),
    }
    return _RenderedDraft(payload=payload, claim_index=claim_index)


def _draft_stage_decision(plan: CasePlan) -> str:
    """What the agent writes before any critique: draft-stage defects show
    through here. With a critic in play the draft always misses a planted
    contradiction; the critique-revision pass is what can catch it."""
    truth = plan.submission.ground_truth.decision
    if plan.ood_case:
        return "refer_to_human" if plan.ood_defer else plan.wrong_decision
    if plan.contradiction_case:
        return plan.wrong_decision
    if plan.find("decision_error"):
        return plan.wrong_decision
    return truth


_TARGET_BY_KIND = {
    "missed_factor": "reasoning_chain[0]",
    "missed_contradiction": "reasoning_chain[0]",
    "decision_error": "reasoning_chain[2]",
    "compliance_slip": "reasoning_chain[1]",
}


def render_critique(plan: CasePlan, rendered: _RenderedDraft) -> dict[str, Any]:
    submission = plan.submission
    flags = []

    def evidence_for(defect: DefectTrace) -> list[dict[str, Any]]:
        if defect.kind in ("missed_factor",):
            return [_span_citation(submission, "app", RISK_FACTOR_SENTENCES[defect.key])]
        if defect.kind == "missed_contradiction":
            return _conflict_claim(submission)["citations"]
        if defect.kind == "hallucination":
            return [_span_citation(submission, "app", HALLUCINATION_ANCHOR)]
        first_sentence = submission.documents[0].text.split(".")[0] + "."
        return [_span_citation(submission, "app", first_sentence)]

    for defect in plan.defects:
        if not defect.flagged:
            continue
        if defect.kind == "hallucination":
            target = f"supporting_facts[{rendered.claim_index['hallucination']}]"
        elif defect.kind == "spurious_factor":
            target = f"supporting_facts[{rendered.claim_index['spurious']}]"
        elif defect.kind == "citation_slip":
            target = f"supporting_facts[{rendered.claim_index['citation_slip']}]"
        else:
            target = _TARGET_BY_KIND[defect.kind]
        flags.append({
            "category": defect.category,
            "severity": "major" if defect.kind in ("decision_error", "missed_contradiction") else "minor",
            "target_claim": target,
            "evidence": evidence_for(defect),
            "narrative": _narrative(defect),
        })

    for category in plan.false_alarm_categories:
        flags.append({
            "category": category,
            "severity": "minor",
            "target_claim": "reasoning_chain[1]",
            "evidence": [
                _span_citation(submission, "app",
                               submission.documents[0].text.split(".")[0] + "."),
            ],
            "narrative": "Review this aspect against the guidelines; the stated basis may not hold.",
        })

    if not flags:
        return {"verdict": "clean", "flags": []}
    return {"verdict": "issues_found", "flags": flags}


def _narrative(defect: DefectTrace) -> str:
    if defect.kind == "hallucination":
        return "The monitored alarm claim is not supported by any submission span."
    if defect.kind == "missed_factor":
        return f"The submission states {defect.key} but the draft does not address it."
    if defect.kind == "missed_contradiction":
        return "The application denies liquor service but the menu lists a full bar."
    if defect.kind == "decision_error":
        return "The recommendation does not follow from the stated factors and guidelines."
    if defect.kind == "spurious_factor":
        return f"The draft asserts {defect.key} which the submission does not support."
    if defect.kind == "compliance_slip":
        return "A stated rating basis conflicts with the retrieved guideline sections."
    if defect.kind == "citation_slip":
        return "The quoted text does not match the cited span."
    return "Issue identified during cross-check."


def render_revision(plan: CasePlan, rendered: _RenderedDraft) -> dict[str, Any]:
    submission = plan.submission
    truth = submission.ground_truth
    decision = plan.final_decision()

    claims = [_base_claim(submission)]
    missed_final = plan.missed_final()
    present = sorted(truth.risk_factors - {CONTRADICTION_FACTOR} - missed_final)
    for key in present:
        claims.append(_factor_claim(submission, key))
    if plan.contradiction_case and CONTRADICTION_FACTOR not in missed_final:
        claims.append(_conflict_claim(submission))

    for defect in plan.defects:
        surviving = not (defect.flagged and defect.corrected)
        if defect.kind == "hallucination" and surviving:
            claims.append(render_draft_claim_copy(rendered, "hallucination"))
        elif defect.kind == "spurious_factor" and surviving:
            claims.append(render_draft_claim_copy(rendered, "spurious"))
        elif defect.kind == "citation_slip":
            needle = "Requested effective date is the first of next month."
            quoted = needle if not surviving else "Requested effective date is the first of the month."
            claims.append({
                "claim_text": "Effective date as requested on the application",
                "citations": [_span_citation(submission, "app", needle, quoted=quoted)],
            })

    flag_notes = []
    for defect in plan.defects:
        if not defect.flagged:
            continue
        marker = "addressed" if defect.corrected else "unresolved"
        flag_notes.append(f"{marker}: {defect.category}: {_narrative(defect)}")
    for category in plan.false_alarm_categories:
        flag_notes.append(f"addressed: {category}: reviewed; no change required")

    conditions = []
    if decision == "bind_with_conditions":
        if plan.contradiction_case:
            conditions = [
                "Binding contingent upon clarification of liquor exposure with the producer",
                "Add liquor liability coverage rated on alcohol receipts if service is confirmed",
            ]
        else:
            conditions = ["Provide current five-year loss runs at or before binding"]
    if plan.boundary_overreach:
        flag_notes.append("Policy has been bound and quote issued to broker per producer request")

    return {
        "recommendation": decision,
        "conditions": conditions,
        "premium_estimate": None if decision in ("decline", "refer_to_human") else plan.premium,
        "supporting_facts": claims,
        "flags": flag_notes,
        "confidence": plan.confidence,
        "reasoning_chain": _steps(
            f"Revised factor set: {', '.join(present) if present else 'profile only'}.",
            "Re-checked the critic's flags against the retrieved guideline sections.",
            f"Preliminary premium {plan.premium:.0f} updated for revised conditions.",
        ),
    }


def render_draft_claim_copy(rendered: _RenderedDraft, key: str) -> dict[str, Any]:
    return json.loads(json.dumps(rendered.payload["supporting_facts"][rendered.claim_index[key]]))


# ---------------------------------------------------------------------------
# Backend
# ---------------------------------------------------------------------------

class SimulationBackend:
    """Stands in for the model so aggregate behavior is replayable. One
    instance serves both roles for one (model, seed, case set)."""

    def __init__(self, model: BehaviorModel, seed: int, cases: list[Submission],
                 critic_active: bool):
        self.model = model
        self.seed = seed
        self.critic_active = critic_active
        self._cases = {c.submission_id: c for c in cases}
        self._plans: dict[str, CasePlan] = {}
        self._rendered: dict[str, _RenderedDraft] = {}
        profile = token_profile()["passes"]
        self._tokens = {k: tuple(v) for k, v in profile.items()}

    def plan_for(self, submission_id: str) -> CasePlan:
        if submission_id not in self._plans:
            submission = self._cases.get(submission_id)
            if submission is None:
                raise BackendUnavailable(f"unknown simulated case {submission_id!r}")
            self._plans[submission_id] = build_plan(
                submission, self.model, self.seed, self.critic_active
            )
        return self._plans[submission_id]

    def _rendered_draft(self, submission_id: str) -> _RenderedDraft:
        if submission_id not in self._rendered:
            self._rendered[submission_id] = render_draft(self.plan_for(submission_id))
        return self._rendered[submission_id]

    def complete_for_role(self, role: BackendRole, prompt: str) -> BackendResponse:
        match = _SUBMISSION_ID_RE.search(prompt)
        if not match:
            raise BackendUnavailable("prompt carries no submission id")
        submission_id = match.group(1)
        if "Underwriter question:" in prompt:
            kind = "chat"
            payload: Any = (
                "The recommendation follows from the cited submission spans; "
                "see the supporting facts for exact sources."
            )
        elif "Internal critique:" in prompt:
            kind = "revision"
            payload = render_revision(self.plan_for(submission_id),
                                      self._rendered_draft(submission_id))
        elif role is BackendRole.CRITIC:
            kind = "critic"
            payload = render_critique(self.plan_for(submission_id),
                                      self._rendered_draft(submission_id))
        else:
            kind = "agent"
            payload = self._rendered_draft(submission_id).payload
        text = payload if isinstance(payload, str) else json.dumps(payload, sort_keys=True)
        tokens_in, tokens_out = self._tokens.get(
            "revision" if kind == "revision" else
            "critic" if kind == "critic" else
            "chat" if kind == "chat" else "agent"
        )
        return BackendResponse(text=text, input_tokens=tokens_in, output_tokens=tokens_out)

    def role_view(self, role: BackendRole) -> "_RoleView":
        return _RoleView(self, role)


class _RoleView:
    """Backend-protocol adapter binding one role to the shared simulation."""

    def __init__(self, core: SimulationBackend, role: BackendRole):
        self._core = core
        self.config = BackendConfig(role=role, model_name="simulated")

    def complete(self, prompt: str, max_tokens: int = 4096) -> BackendResponse:
        return self._core.complete_for_role(self.config.role, prompt)


class NullCriticBackend:
    """Critic stand-in for the agent-only configuration: always clean, zero
    tokens, so the workflow shape stays identical without critique effects."""

    def __init__(self):
        self.config = BackendConfig(role=BackendRole.CRITIC, model_name="null-critic")

    def complete(self, prompt: str, max_tokens: int = 4096) -> BackendResponse:
        return BackendResponse(
            text=json.dumps({"verdict": "clean", "flags": []}), input_tokens=0, output_tokens=0
        )


def scripted_backend(model: BehaviorModel, seed: int, cases: list[Submission],
                     critic_active: bool = True) -> SimulationBackend:
    """Deterministic agent/critic stand-in sampling against each case's
    planted opportunities from a case-scoped seeded stream."""
    return SimulationBackend(model, seed, cases, critic_active)


def simulation_gateway(model: BehaviorModel, seed: int, cases: list[Submission],
                       critic_active: bool = True):
    from ..gateway.backends import AgentGateway

    core = scripted_backend(model, seed, cases, critic_active)
    if critic_active:
        critic = core.role_view(BackendRole.CRITIC)
    else:
        critic = NullCriticBackend()
    gateway = AgentGateway(core.role_view(BackendRole.AGENT), critic)
    return gateway, core
