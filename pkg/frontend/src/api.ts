// HTTP client over the documented service API. Errors arrive as
// problem-detail JSON; ApiError keeps the machine-readable code so the UI
// can branch on StaleCase / WrongState without string matching.

import type {
  AuditBundle,
  CaseView,
  ChatReply,
  DecisionAction,
  DraftPayload,
  JsonSchema,
  QueueEntry,
  RecordedOutcome,
} from "./types";

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, code: string, detail: string) {
    super(detail);
    this.status = status;
    this.code = code;
  }
}

export type DecisionBody = {
  action: DecisionAction;
  token: string;
  final_recommendation?: DraftPayload;
  notes?: string;
};

export interface ReviewerApi {
  listCases(state?: string): Promise<QueueEntry[]>;
  getCase(caseId: string): Promise<CaseView>;
  submitDecision(caseId: string, body: DecisionBody, reviewerId: string): Promise<RecordedOutcome>;
  resolveEscalated(caseId: string, reviewerId: string): Promise<{ state: string }>;
  chat(caseId: string, question: string): Promise<ChatReply>;
  audit(caseId: string): Promise<AuditBundle>;
  draftSchema(): Promise<JsonSchema>;
}

async function parseProblem(response: Response): Promise<never> {
  let code = `Http${response.status}`;
  let detail = response.statusText;
  try {
    const body = (await response.json()) as { code?: string; detail?: string };
    if (body.code) code = body.code;
    if (body.detail) detail = body.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, code, detail);
}

export class HttpReviewerApi implements ReviewerApi {
  private readonly base: string;

  constructor(baseUrl = "") {
    this.base = baseUrl.replace(/\/$/, "");
  }

  private async get<T>(path: string): Promise<T> {
    const response = await fetch(this.base + path);
    if (!response.ok) await parseProblem(response);
    return (await response.json()) as T;
  }

  private async post<T>(path: string, body: unknown, reviewerId?: string): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (reviewerId) headers["X-Reviewer-Id"] = reviewerId;
    const response = await fetch(this.base + path, {
      method: "POST",
      headers,
      body: JSON.stringify(body),
    });
    if (!response.ok) await parseProblem(response);
    return (await response.json()) as T;
  }

  async listCases(state?: string): Promise<QueueEntry[]> {
    const query = state ? `?state=${encodeURIComponent(state)}` : "";
    const body = await this.get<{ cases: QueueEntry[] }>(`/cases${query}`);
    return body.cases;
  }

  getCase(caseId: string): Promise<CaseView> {
    return this.get(`/cases/${encodeURIComponent(caseId)}`);
  }

  submitDecision(caseId: string, body: DecisionBody, reviewerId: string): Promise<RecordedOutcome> {
    return this.post(`/cases/${encodeURIComponent(caseId)}/decision`, body, reviewerId);
  }

  resolveEscalated(caseId: string, reviewerId: string): Promise<{ state: string }> {
    return this.post(`/cases/${encodeURIComponent(caseId)}/resolve`, {}, reviewerId);
  }

  chat(caseId: string, question: string): Promise<ChatReply> {
    return this.post(`/cases/${encodeURIComponent(caseId)}/chat`, { question });
  }

  audit(caseId: string): Promise<AuditBundle> {
    return this.get(`/cases/${encodeURIComponent(caseId)}/audit`);
  }

  draftSchema(): Promise<JsonSchema> {
    return this.get("/schema/draft-decision");
  }
}
