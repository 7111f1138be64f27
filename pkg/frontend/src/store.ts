// Reviewer desk controller: queue + selected-case state, optimistic
// concurrency, and the submit rules. No control in here can record an
// outcome without an explicit reviewer action on a loaded case: every
// recording path goes through submitDecision with the loaded token.

import { ApiError, type DecisionBody, type ReviewerApi } from "./api";
import { parseAndValidate } from "./schema";
import type {
  CaseView,
  DecisionAction,
  DraftPayload,
  JsonSchema,
  QueueEntry,
  RecordedOutcome,
} from "./types";

export type ChatEntry = { role: "reviewer" | "assistant"; text: string };

export type CaseModel = {
  view: CaseView;
  token: string;
  editing: boolean;
  editedPayload: string; // JSON text under edit; survives conflicts untouched
  editErrors: string[];
  submitting: boolean;
  conflict: boolean; // a 409 happened: case changed, reload before deciding
  outcome: RecordedOutcome | null;
  error: string | null;
  chat: ChatEntry[];
};

export type DeskModel = {
  reviewerId: string;
  queue: QueueEntry[];
  queueLoaded: boolean;
  selected: CaseModel | null;
  lastError: string | null;
};

export type Listener = (model: DeskModel) => void;

export class ReviewerDesk {
  private readonly api: ReviewerApi;
  private schema: JsonSchema | null = null;
  private listeners: Listener[] = [];
  model: DeskModel;

  constructor(api: ReviewerApi, reviewerId = "") {
    this.api = api;
    this.model = {
      reviewerId,
      queue: [],
      queueLoaded: false,
      selected: null,
      lastError: null,
    };
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.model);
  }

  setReviewer(reviewerId: string): void {
    this.model.reviewerId = reviewerId.trim();
    this.emit();
  }

  async refreshQueue(): Promise<void> {
    const awaiting = await this.api.listCases("awaiting_auth");
    const escalated = await this.api.listCases("escalated");
    this.model.queue = [...escalated, ...awaiting];
    this.model.queueLoaded = true;
    this.emit();
  }

  async openCase(caseId: string): Promise<void> {
    const view = await this.api.getCase(caseId);
    this.model.selected = {
      view,
      token: view.concurrency_token,
      editing: false,
      editedPayload: JSON.stringify(view.recommendation, null, 2),
      editErrors: [],
      submitting: false,
      conflict: false,
      outcome: null,
      error: null,
      chat: [],
    };
    this.emit();
  }

  closeCase(): void {
    this.model.selected = null;
    this.emit();
  }

  /** Re-fetch the case after a conflict; the reviewer's draft edits are
   * kept exactly as typed so nothing is lost on reload. */
  async reloadCase(): Promise<void> {
    const selected = this.model.selected;
    if (!selected) return;
    const keptEdits = selected.editedPayload;
    const keptEditing = selected.editing;
    const keptChat = selected.chat;
    const view = await this.api.getCase(selected.view.case_id);
    this.model.selected = {
      view,
      token: view.concurrency_token,
      editing: keptEditing,
      editedPayload: keptEdits,
      editErrors: [],
      submitting: false,
      conflict: false,
      outcome: selected.outcome,
      error: null,
      chat: keptChat,
    };
    this.emit();
  }

  /** The submit controls are live only for a loaded case awaiting
   * authorization, with a reviewer identity set, not already decided. */
  canSubmit(): boolean {
    const selected = this.model.selected;
    return Boolean(
      selected &&
        selected.view.state === "awaiting_human_auth" &&
        this.model.reviewerId !== "" &&
        !selected.submitting &&
        !selected.conflict &&
        selected.outcome === null,
    );
  }

  beginEdit(): void {
    const selected = this.model.selected;
    if (!selected) return;
    selected.editing = true;
    this.emit();
  }

  updateEdit(text: string): void {
    const selected = this.model.selected;
    if (!selected) return;
    selected.editedPayload = text;
    selected.editErrors = [];
    this.emit();
  }

  private async draftSchema(): Promise<JsonSchema> {
    if (!this.schema) this.schema = await this.api.draftSchema();
    return this.schema;
  }

  async submitDecision(action: DecisionAction, notes = ""): Promise<void> {
    const selected = this.model.selected;
    if (!selected || !this.canSubmit()) return;

    const body: DecisionBody = { action, token: selected.token, notes };
    if (action === "modify" || action === "override") {
      const schema = await this.draftSchema();
      const { payload, errors } = parseAndValidate(selected.editedPayload, schema);
      if (errors.length > 0) {
        selected.editErrors = errors;
        this.emit();
        return;
      }
      body.final_recommendation = payload as unknown as DraftPayload;
    }

    selected.submitting = true;
    selected.error = null;
    this.emit();
    try {
      const outcome = await this.api.submitDecision(
        selected.view.case_id,
        body,
        this.model.reviewerId,
      );
      selected.outcome = outcome;
      if (action === "escalate") {
        // The case left the authorization queue; show the diverted state.
        await this.reloadCase();
        return;
      }
    } catch (exc) {
      if (exc instanceof ApiError && exc.status === 409) {
        selected.conflict = true;
        selected.error = "case changed, reload";
      } else if (exc instanceof ApiError) {
        selected.error = `${exc.code}: ${exc.message}`;
      } else {
        selected.error = String(exc);
      }
    } finally {
      selected.submitting = false;
      this.emit();
    }
  }

  async resolveEscalated(): Promise<void> {
    const selected = this.model.selected;
    if (!selected || selected.view.state !== "escalated" || !this.model.reviewerId) return;
    await this.api.resolveEscalated(selected.view.case_id, this.model.reviewerId);
    await this.reloadCase();
  }

  async askChat(question: string): Promise<void> {
    const selected = this.model.selected;
    if (!selected || !question.trim()) return;
    selected.chat.push({ role: "reviewer", text: question });
    this.emit();
    const reply = await this.api.chat(selected.view.case_id, question);
    selected.chat.push({ role: "assistant", text: reply.answer });
    this.emit();
  }
}
