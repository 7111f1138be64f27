// Application shell: wires the controller to the two screens, polls the
// queue, and keeps the reviewer identity in a header field. Routing is a
// plain in-memory screen switch; the service holds all durable state.

import { HttpReviewerApi, type ReviewerApi } from "./api";
import { h } from "./dom";
import { ReviewerDesk } from "./store";
import { renderCaseScreen, type ViewerSelection } from "./views/caseScreen";
import { renderQueue } from "./views/queue";

export type AppOptions = {
  api?: ReviewerApi;
  reviewerId?: string;
  pollIntervalMs?: number;
};

export class ReviewerApp {
  readonly desk: ReviewerDesk;
  private readonly root: HTMLElement;
  private selection: ViewerSelection = null;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(root: HTMLElement, options: AppOptions = {}) {
    this.root = root;
    this.desk = new ReviewerDesk(options.api ?? new HttpReviewerApi(), options.reviewerId ?? "");
    this.desk.subscribe(() => this.render());
    if (options.pollIntervalMs) {
      this.timer = setInterval(() => {
        if (!this.desk.model.selected) void this.desk.refreshQueue();
      }, options.pollIntervalMs);
    }
  }

  async start(): Promise<void> {
    await this.desk.refreshQueue();
    this.render();
  }

  stop(): void {
    if (this.timer) clearInterval(this.timer);
  }

  render(): void {
    const model = this.desk.model;
    this.root.replaceChildren();

    const header = h("header", { class: "topbar" },
      h("h1", {}, "Underwriting review desk"));
    const reviewerInput = h("input", {
      class: "reviewer-id",
      "data-testid": "reviewer-id",
      type: "text",
      placeholder: "reviewer id",
      oninput: (event: Event) =>
        this.desk.setReviewer((event.target as HTMLInputElement).value),
    }) as HTMLInputElement;
    reviewerInput.value = model.reviewerId;
    header.append(reviewerInput);
    this.root.append(header);

    if (model.selected) {
      this.root.append(
        renderCaseScreen(model.selected, model.reviewerId, this.desk.canSubmit(), {
          onBack: () => {
            this.selection = null;
            this.desk.closeCase();
            void this.desk.refreshQueue();
          },
          onDecision: (action) => void this.desk.submitDecision(action),
          onEditChange: (text) => this.desk.updateEdit(text),
          onBeginEdit: () => this.desk.beginEdit(),
          onReload: () => void this.desk.reloadCase(),
          onResolve: () => void this.desk.resolveEscalated(),
          onChat: (question) => void this.desk.askChat(question),
          onJumpToSpan: (docId, span) => {
            this.selection = { docId, span };
            this.render();
          },
        }, this.selection),
      );
    } else {
      this.root.append(
        renderQueue(model.queue, model.queueLoaded, (caseId) => void this.desk.openCase(caseId)),
      );
    }
  }
}

export function mount(selector = "#app", options: AppOptions = {}): ReviewerApp {
  const root = document.querySelector<HTMLElement>(selector);
  if (!root) throw new Error(`no element matches ${selector}`);
  const app = new ReviewerApp(root, { pollIntervalMs: 4000, ...options });
  void app.start();
  return app;
}
