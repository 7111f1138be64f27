// Queue screen: escalated cases first on their own visual channel, then the
// awaiting-authorization list ordered by submission time.

import { h } from "../dom";
import type { QueueEntry } from "../types";

export function renderQueue(
  entries: QueueEntry[],
  loaded: boolean,
  onOpen: (caseId: string) => void,
): HTMLElement {
  const root = h("section", { class: "queue", "data-testid": "queue" });
  root.append(h("h2", {}, "Review queue"));

  if (!loaded) {
    root.append(h("p", { class: "queue-loading" }, "Loading queue..."));
    return root;
  }
  if (entries.length === 0) {
    root.append(
      h("p", { class: "queue-empty", "data-testid": "queue-empty" },
        "No cases waiting for review."),
    );
    return root;
  }

  const list = h("ul", { class: "queue-list" });
  for (const entry of entries) {
    const escalated = entry.state === "escalated";
    const item = h(
      "li",
      {
        class: escalated ? "queue-item escalated" : "queue-item",
        "data-testid": `queue-item-${entry.case_id}`,
        "data-state": entry.state,
      },
      h("span", { class: "case-id" }, entry.case_id),
      h("span", { class: "tier" }, entry.tier),
      h("span", { class: "lob" }, entry.line_of_business),
    );
    if (entry.critique_flag_count > 0) {
      item.append(
        h(
          "span",
          { class: "flag-badge", "data-testid": "flag-badge" },
          `${entry.critique_flag_count} flag${entry.critique_flag_count === 1 ? "" : "s"}`,
        ),
      );
    }
    if (escalated) {
      const reason = entry.escalation_reason.split(":")[0] ?? "Escalated";
      item.append(
        h("span", { class: "escalation-reason", "data-testid": "escalation-reason" }, reason),
      );
    }
    const open = h("button", { class: "open-case", onclick: () => onOpen(entry.case_id) }, "Open");
    item.append(open);
    list.append(item);
  }
  root.append(list);
  return root;
}
