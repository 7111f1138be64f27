// In-memory ReviewerApi double shared by the view-model and DOM tests.

import { ApiError, type DecisionBody, type ReviewerApi } from "../src/api";
import type {
  AuditBundle,
  CaseView,
  ChatReply,
  JsonSchema,
  QueueEntry,
  RecordedOutcome,
} from "../src/types";
import { readFileSync } from "node:fs";
import { join, dirname } from "node:path";
import { fileURLToPath } from "node:url";

const here = dirname(fileURLToPath(import.meta.url));

export function loadDraftSchema(): JsonSchema {
  return JSON.parse(readFileSync(join(here, "fixtures", "draft_schema.json"), "utf-8"));
}

export function caseViewFixture(overrides: Partial<CaseView> = {}): CaseView {
  const base: CaseView = {
    case_id: "case-b",
    state: "awaiting_human_auth",
    tier: "medium",
    line_of_business: "restaurant",
    submitted_at: "2026-01-01T00:00:00Z",
    critique_cycles_used: 1,
    concurrency_token: "case-b:5",
    escalation_reason: "",
    recommendation: {
      recommendation: "bind_with_conditions",
      conditions: ["Binding contingent upon clarification of liquor exposure with the producer"],
      premium_estimate: 9200,
      supporting_facts: [],
      flags: ["addressed: factual_inconsistency: made contingent"],
      confidence: 0.84,
      reasoning_chain: [
        { label: "risk_factor_extraction", detail: "conflict" },
        { label: "guideline_compliance_check", detail: "liquor rule" },
        { label: "premium_computation", detail: "standard" },
      ],
    },
    supporting_facts_resolved: [
      {
        claim_text: "Application and menu conflict on liquor service",
        citations: [
          {
            kind: "submission_span",
            target_id: "app",
            span: [10, 30],
            quoted_text: "Liquor service: none",
            resolved_text: "Liquor service: none",
            resolution: "ok",
          },
          {
            kind: "submission_span",
            target_id: "menu",
            span: [5, 20],
            quoted_text: "Full bar with cocktails",
            resolved_text: "Full bar with cocktails",
            resolution: "ok",
          },
        ],
      },
    ],
    flags: [],
    unresolved_critique_flags: [],
    draft_history: [],
    critique_history: [
      {
        verdict: "issues_found",
        flags: [
          {
            category: "factual_inconsistency",
            severity: "major",
            target_claim: "supporting_facts[0]",
            evidence: [
              { kind: "submission_span", target_id: "app", span: [10, 30],
                quoted_text: "Liquor service: none" },
              { kind: "submission_span", target_id: "menu", span: [5, 20],
                quoted_text: "Full bar with cocktails" },
            ],
            narrative: "application denies liquor, menu lists a full bar",
          },
        ],
      },
    ],
    guard_outcomes: [{ passed: true, reason: "Clean", detail: "" }],
    documents: [
      { doc_id: "app", doc_type: "application", text: "Seating 64. Liquor service: none. More text." },
      { doc_id: "menu", doc_type: "menu", text: "Menu. Full bar with cocktails all evening." },
    ],
    hallucination_warnings: [],
  };
  return { ...base, ...overrides };
}

export class FakeApi implements ReviewerApi {
  queue: QueueEntry[] = [];
  views = new Map<string, CaseView>();
  decisions: { caseId: string; body: DecisionBody; reviewerId: string }[] = [];
  nextDecisionError: ApiError | null = null;
  recordSeq = 40;

  async listCases(state?: string): Promise<QueueEntry[]> {
    return this.queue.filter((entry) =>
      state === "awaiting_auth"
        ? entry.state === "awaiting_human_auth"
        : state
          ? entry.state === state
          : true,
    );
  }

  async getCase(caseId: string): Promise<CaseView> {
    const view = this.views.get(caseId);
    if (!view) throw new ApiError(404, "UnknownCase", caseId);
    return JSON.parse(JSON.stringify(view)) as CaseView;
  }

  async submitDecision(caseId: string, body: DecisionBody, reviewerId: string): Promise<RecordedOutcome> {
    this.decisions.push({ caseId, body, reviewerId });
    if (this.nextDecisionError) {
      const error = this.nextDecisionError;
      this.nextDecisionError = null;
      throw error;
    }
    return {
      case_id: caseId,
      action: body.action,
      reviewer_id: reviewerId,
      recorded: body.action !== "escalate",
      final_recommendation: body.final_recommendation ?? null,
      decided_at: "2026-01-01T01:00:00Z",
      record_seq: this.recordSeq++,
    };
  }

  async resolveEscalated(caseId: string): Promise<{ state: string }> {
    const view = this.views.get(caseId);
    if (view) view.state = "awaiting_human_auth";
    return { state: "awaiting_human_auth" };
  }

  async chat(_caseId: string, question: string): Promise<ChatReply> {
    return { answer: `about: ${question}`, citations: [], state: "awaiting_human_auth" };
  }

  async audit(caseId: string): Promise<AuditBundle> {
    return {
      case_id: caseId,
      verification: { clean: true, records_verified: 0, first_bad_seq: null },
      records: [],
    };
  }

  async draftSchema(): Promise<JsonSchema> {
    return loadDraftSchema();
  }
}

export function queueEntry(overrides: Partial<QueueEntry> = {}): QueueEntry {
  return {
    case_id: "case-1",
    state: "awaiting_human_auth",
    tier: "simple",
    line_of_business: "office",
    submitted_at: "2026-01-01T00:00:00Z",
    critique_flag_count: 0,
    escalation_reason: "",
    ...overrides,
  };
}
