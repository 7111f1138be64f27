// Mirrors of the service's wire types. The server is authoritative; nothing
// here re-derives values the API already provides.

export type CaseStateName =
  | "ingest"
  | "analyze"
  | "critique"
  | "revise"
  | "decision"
  | "awaiting_human_auth"
  | "record"
  | "escalated"
  | "closed";

export type QueueEntry = {
  case_id: string;
  state: CaseStateName;
  tier: string;
  line_of_business: string;
  submitted_at: string;
  critique_flag_count: number;
  escalation_reason: string;
};

export type WireCitation = {
  kind: "submission_span" | "guideline_chunk" | "tool_result";
  target_id: string;
  span: [number, number] | null;
  quoted_text: string;
};

export type ResolvedCitation = WireCitation & {
  resolved_text: string | null;
  resolution: string; // "ok" | "quote_mismatch" | error class name
  warning?: string;
};

export type ResolvedFact = {
  claim_text: string;
  citations: ResolvedCitation[];
};

export type DraftPayload = {
  recommendation: string;
  conditions: string[];
  premium_estimate: number | null;
  supporting_facts: { claim_text: string; citations: WireCitation[] }[];
  flags: string[];
  confidence: number;
  reasoning_chain: { label: string; detail: string }[];
};

export type CritiqueFlagView = {
  category: string;
  severity: string;
  target_claim: string;
  evidence: WireCitation[];
  narrative: string;
};

export type CritiqueView = {
  verdict: "clean" | "issues_found";
  flags: CritiqueFlagView[];
};

export type GuardOutcomeView = {
  passed: boolean;
  reason: string;
  detail: string;
};

export type DocumentView = {
  doc_id: string;
  doc_type: string;
  text: string;
};

export type HallucinationWarning = {
  claim_text: string;
  quoted_text: string;
  actual_text: string | null;
};

export type CaseView = {
  case_id: string;
  state: CaseStateName;
  tier: string;
  line_of_business: string;
  submitted_at: string;
  critique_cycles_used: number;
  concurrency_token: string;
  escalation_reason: string;
  recommendation: DraftPayload | null;
  supporting_facts_resolved: ResolvedFact[];
  flags: string[];
  unresolved_critique_flags: CritiqueFlagView[];
  draft_history: DraftPayload[];
  critique_history: CritiqueView[];
  guard_outcomes: GuardOutcomeView[];
  documents: DocumentView[];
  hallucination_warnings: HallucinationWarning[];
};

export type RecordedOutcome = {
  case_id: string;
  action: string;
  reviewer_id: string;
  recorded: boolean;
  final_recommendation: DraftPayload | null;
  decided_at: string;
  record_seq: number | null;
};

export type AuditRecordView = {
  seq: number;
  case_id: string;
  event_kind: string;
  payload: Record<string, unknown>;
  prev_hash: string;
  this_hash: string;
};

export type AuditBundle = {
  case_id: string;
  verification: { clean: boolean; records_verified: number; first_bad_seq: number | null };
  records: AuditRecordView[];
};

export type ChatReply = {
  answer: string;
  citations: WireCitation[];
  state: CaseStateName;
};

export type DecisionAction = "accept" | "modify" | "override" | "escalate";

export type JsonSchema = Record<string, unknown>;
