// Case screen: evidence with resolved citations, a jump-to-span document
// viewer, critique history with the draft/revision diff, guard outcomes,
// the decision actions, and the chat panel. Every quoted text shown here
// comes from the server's resolved view; the client never excerpts quotes
// on its own.

import { h, spanSegments } from "../dom";
import type { CaseModel } from "../store";
import type {
  CritiqueFlagView,
  DecisionAction,
  DraftPayload,
  ResolvedCitation,
} from "../types";

export type CaseScreenHandlers = {
  onBack: () => void;
  onDecision: (action: DecisionAction) => void;
  onEditChange: (text: string) => void;
  onBeginEdit: () => void;
  onReload: () => void;
  onResolve: () => void;
  onChat: (question: string) => void;
  onJumpToSpan: (docId: string, span: [number, number] | null) => void;
};

export type ViewerSelection = { docId: string; span: [number, number] | null } | null;

function citationNode(
  citation: ResolvedCitation,
  onJump: CaseScreenHandlers["onJumpToSpan"],
): HTMLElement {
  const mismatch = citation.resolution === "quote_mismatch";
  const failed = citation.resolution !== "ok" && !mismatch;
  const node = h(
    "div",
    {
      class: mismatch
        ? "citation hallucination-warning"
        : failed
          ? "citation citation-unresolved"
          : "citation",
      "data-testid": mismatch ? "citation-mismatch" : "citation",
      "data-resolution": citation.resolution,
    },
    h("span", { class: "citation-target" }, `${citation.kind}:${citation.target_id}`),
    h("blockquote", { class: "citation-text" },
      citation.resolved_text ?? "(unresolvable citation)"),
  );
  if (mismatch) {
    node.append(
      h("p", { class: "warning-label" },
        `quoted "${citation.quoted_text}" does not match the source`),
    );
  }
  if (citation.kind === "submission_span") {
    node.append(
      h("button", {
        class: "jump-to-span",
        onclick: () => onJump(citation.target_id, citation.span),
      }, "Show in document"),
    );
  }
  return node;
}

function flagNode(flag: CritiqueFlagView): HTMLElement {
  const node = h(
    "div",
    { class: `critique-flag severity-${flag.severity}`, "data-testid": "critique-flag",
      "data-category": flag.category },
    h("span", { class: "flag-category" }, flag.category),
    h("span", { class: "flag-severity" }, flag.severity),
    h("p", { class: "flag-narrative" }, flag.narrative),
    h("span", { class: "flag-target" }, `targets ${flag.target_claim}`),
  );
  const evidence = h("div", { class: "flag-evidence" });
  for (const citation of flag.evidence) {
    evidence.append(
      h("span", { class: "evidence-ref", "data-testid": "flag-evidence" },
        `${citation.target_id}: "${citation.quoted_text}"`),
    );
  }
  node.append(evidence);
  return node;
}

function draftDiff(original: DraftPayload, revised: DraftPayload): HTMLElement {
  const rows: HTMLElement[] = [];
  if (original.recommendation !== revised.recommendation) {
    rows.push(h("li", {}, `recommendation: ${original.recommendation} -> ${revised.recommendation}`));
  }
  const before = new Set(original.conditions);
  const after = new Set(revised.conditions);
  for (const condition of revised.conditions) {
    if (!before.has(condition)) rows.push(h("li", { class: "diff-added" }, `+ ${condition}`));
  }
  for (const condition of original.conditions) {
    if (!after.has(condition)) rows.push(h("li", { class: "diff-removed" }, `- ${condition}`));
  }
  for (const note of revised.flags) {
    rows.push(h("li", { class: "diff-note" }, note));
  }
  if (rows.length === 0) rows.push(h("li", {}, "no visible changes"));
  return h("ul", { class: "draft-diff", "data-testid": "draft-diff" }, ...rows);
}

function documentViewer(model: CaseModel, selection: ViewerSelection): HTMLElement {
  const viewer = h("section", { class: "doc-viewer", "data-testid": "doc-viewer" },
    h("h3", {}, "Documents"));
  for (const doc of model.view.documents) {
    const panel = h("article", { class: "doc", "data-doc-id": doc.doc_id },
      h("h4", {}, `${doc.doc_id} (${doc.doc_type})`));
    const isTarget = selection && selection.docId === doc.doc_id && selection.span;
    if (isTarget && selection.span) {
      const segments = spanSegments(doc.text, selection.span[0], selection.span[1]);
      if (segments) {
        panel.append(
          h("pre", { class: "doc-text" },
            segments.before,
            h("mark", { "data-testid": "span-highlight" }, segments.inside),
            segments.after),
        );
        viewer.append(panel);
        continue;
      }
    }
    panel.append(h("pre", { class: "doc-text" }, doc.text));
    viewer.append(panel);
  }
  return viewer;
}

export function renderCaseScreen(
  model: CaseModel,
  reviewerId: string,
  canSubmit: boolean,
  handlers: CaseScreenHandlers,
  selection: ViewerSelection = null,
): HTMLElement {
  const view = model.view;
  const root = h("section", { class: "case-screen", "data-testid": "case-screen",
                              "data-case-id": view.case_id });
  root.append(
    h("button", { class: "back", onclick: handlers.onBack }, "Back to queue"),
    h("h2", {}, `Case ${view.case_id}`),
    h("p", { class: "case-meta" },
      `${view.state} | ${view.tier} | ${view.line_of_business} | cycles ${view.critique_cycles_used}`),
  );

  if (view.state === "escalated") {
    root.append(
      h("div", { class: "escalation-banner", "data-testid": "escalation-banner" },
        `Escalated: ${view.escalation_reason}`,
        h("button", { class: "resolve", onclick: handlers.onResolve },
          "Resolve to authorization queue")),
    );
  }

  for (const warning of view.hallucination_warnings) {
    root.append(
      h("div", { class: "hallucination-banner", "data-testid": "hallucination-banner" },
        `Possible fabricated citation: claimed "${warning.quoted_text}" but the source reads "${warning.actual_text ?? ""}"`),
    );
  }

  if (model.outcome && model.outcome.recorded) {
    root.append(
      h("div", { class: "success-panel", "data-testid": "success-panel" },
        h("h3", {}, "Decision recorded"),
        h("p", {}, `Outcome ${model.outcome.record_seq} (${model.outcome.action}) `
          + `by ${model.outcome.reviewer_id}`)),
    );
  }

  if (model.conflict) {
    root.append(
      h("div", { class: "conflict-banner", "data-testid": "conflict-banner" },
        "case changed, reload",
        h("button", { class: "reload", onclick: handlers.onReload }, "Reload case")),
    );
  }
  if (model.error && !model.conflict) {
    root.append(h("div", { class: "error-banner", "data-testid": "error-banner" }, model.error));
  }

  // Recommendation.
  const recommendation = view.recommendation;
  const recPanel = h("section", { class: "recommendation", "data-testid": "recommendation" },
    h("h3", {}, "Recommendation"));
  if (recommendation) {
    recPanel.append(
      h("p", { class: "rec-decision" }, recommendation.recommendation),
      h("p", { class: "rec-confidence" }, `confidence ${recommendation.confidence}`),
    );
    if (recommendation.premium_estimate !== null) {
      recPanel.append(h("p", { class: "rec-premium" }, `premium ${recommendation.premium_estimate}`));
    }
    if (recommendation.conditions.length > 0) {
      recPanel.append(h("ul", { class: "rec-conditions" },
        ...recommendation.conditions.map((c) => h("li", {}, c))));
    }
    for (const note of recommendation.flags) {
      recPanel.append(h("p", { class: "rec-flag" }, note));
    }
  } else {
    recPanel.append(h("p", {}, "No recommendation was produced for this case."));
  }
  root.append(recPanel);

  // Unresolved critique flags surface prominently.
  if (view.unresolved_critique_flags.length > 0) {
    const panel = h("section", { class: "unresolved-flags", "data-testid": "unresolved-flags" },
      h("h3", {}, `Unresolved critique flags (${view.unresolved_critique_flags.length})`));
    for (const flag of view.unresolved_critique_flags) panel.append(flagNode(flag));
    root.append(panel);
  }

  // Supporting facts with server-resolved citations.
  const facts = h("section", { class: "facts", "data-testid": "facts" },
    h("h3", {}, "Supporting facts"));
  for (const fact of view.supporting_facts_resolved) {
    const factNode = h("article", { class: "fact" },
      h("p", { class: "claim" }, fact.claim_text));
    for (const citation of fact.citations) {
      factNode.append(citationNode(citation, handlers.onJumpToSpan));
    }
    facts.append(factNode);
  }
  root.append(facts);

  root.append(documentViewer(model, selection));

  // Critique history with the original/revision diff.
  const history = h("section", { class: "critique-history", "data-testid": "critique-history" },
    h("h3", {}, "Critique history"));
  view.critique_history.forEach((critique, index) => {
    const block = h("article", { class: "critique" },
      h("h4", {}, `Critique ${index + 1}: ${critique.verdict}`));
    for (const flag of critique.flags) block.append(flagNode(flag));
    history.append(block);
  });
  if (view.draft_history.length >= 2) {
    const first = view.draft_history[0];
    const last = view.draft_history[view.draft_history.length - 1];
    if (first && last) {
      history.append(h("h4", {}, "Original draft vs revision"), draftDiff(first, last));
    }
  }
  root.append(history);

  // Guard outcomes.
  const guards = h("section", { class: "guards", "data-testid": "guards" },
    h("h3", {}, "Guard outcomes"));
  for (const outcome of view.guard_outcomes) {
    guards.append(
      h("p", { class: outcome.passed ? "guard passed" : "guard failed" },
        `${outcome.reason}${outcome.detail ? `: ${outcome.detail}` : ""}`),
    );
  }
  root.append(guards);

  // Actions.
  const actions = h("section", { class: "actions", "data-testid": "actions" },
    h("h3", {}, "Decision"),
    h("p", { class: "reviewer-line" },
      reviewerId ? `Acting as ${reviewerId}` : "Set a reviewer identity to act."));
  const mkActionButton = (action: DecisionAction, label: string) => {
    const attrs: Record<string, string | ((event: Event) => void)> = {
      class: `action action-${action}`,
      "data-testid": `action-${action}`,
      onclick: () => handlers.onDecision(action),
    };
    if (!canSubmit) attrs["disabled"] = "disabled";
    return h("button", attrs, label);
  };
  actions.append(
    mkActionButton("accept", "Accept"),
    mkActionButton("modify", "Modify"),
    mkActionButton("override", "Override"),
    mkActionButton("escalate", "Escalate"),
  );

  const editor = h("div", { class: "editor", "data-testid": "editor" },
    h("p", {}, "Recommendation payload for modify/override (validated against the published schema):"));
  const textarea = h("textarea", {
    class: "edit-payload",
    "data-testid": "edit-payload",
    rows: "14",
    oninput: (event: Event) => handlers.onEditChange((event.target as HTMLTextAreaElement).value),
  }) as HTMLTextAreaElement;
  textarea.value = model.editedPayload;
  editor.append(textarea);
  for (const error of model.editErrors) {
    editor.append(h("p", { class: "edit-error", "data-testid": "edit-error" }, error));
  }
  actions.append(editor);
  root.append(actions);

  // Chat panel.
  const chat = h("section", { class: "chat-panel", "data-testid": "chat-panel" },
    h("h3", {}, "Ask about this recommendation"));
  const log = h("div", { class: "chat-log" });
  for (const entry of model.chat) {
    log.append(h("p", { class: `chat-${entry.role}` }, `${entry.role}: ${entry.text}`));
  }
  chat.append(log);
  const question = h("input", {
    class: "chat-input",
    "data-testid": "chat-input",
    type: "text",
    placeholder: "Why this recommendation?",
  }) as HTMLInputElement;
  chat.append(
    question,
    h("button", {
      class: "chat-send",
      "data-testid": "chat-send",
      onclick: () => {
        handlers.onChat(question.value);
        question.value = "";
      },
    }, "Ask"),
  );
  root.append(chat);
  return root;
}
