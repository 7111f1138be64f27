import { beforeEach, describe, expect, it } from "vitest";

import { ApiError } from "../src/api";
import { ReviewerDesk } from "../src/store";
import { FakeApi, caseViewFixture, queueEntry } from "./fakes";

let api: FakeApi;
let desk: ReviewerDesk;

beforeEach(() => {
  api = new FakeApi();
  desk = new ReviewerDesk(api, "uw-1");
});

describe("queue refresh", () => {
  it("lists escalated cases ahead of awaiting-auth cases", async () => {
    api.queue = [
      queueEntry({ case_id: "a" }),
      queueEntry({ case_id: "b", state: "escalated", escalation_reason: "LowConfidence: 0.4" }),
    ];
    await desk.refreshQueue();
    expect(desk.model.queue.map((entry) => entry.case_id)).toEqual(["b", "a"]);
    expect(desk.model.queueLoaded).toBe(true);
  });
});

describe("submit rules", () => {
  it("cannot submit without a loaded case", () => {
    expect(desk.canSubmit()).toBe(false);
  });

  it("cannot submit without a reviewer identity", async () => {
    api.views.set("case-b", caseViewFixture());
    await desk.openCase("case-b");
    desk.setReviewer("");
    expect(desk.canSubmit()).toBe(false);
    desk.setReviewer("uw-1");
    expect(desk.canSubmit()).toBe(true);
  });

  it("cannot submit when the case is not awaiting authorization", async () => {
    api.views.set("case-b", caseViewFixture({ state: "escalated" }));
    await desk.openCase("case-b");
    expect(desk.canSubmit()).toBe(false);
  });

  it("cannot submit twice: a recorded outcome freezes the controls", async () => {
    api.views.set("case-b", caseViewFixture());
    await desk.openCase("case-b");
    await desk.submitDecision("accept");
    expect(desk.model.selected?.outcome?.recorded).toBe(true);
    expect(desk.canSubmit()).toBe(false);
    await desk.submitDecision("accept");
    expect(api.decisions.length).toBe(1);
  });
});

describe("accept", () => {
  it("sends the loaded concurrency token and reviewer header", async () => {
    api.views.set("case-b", caseViewFixture({ concurrency_token: "case-b:9" }));
    await desk.openCase("case-b");
    await desk.submitDecision("accept");
    expect(api.decisions[0]).toMatchObject({
      caseId: "case-b",
      reviewerId: "uw-1",
      body: { action: "accept", token: "case-b:9" },
    });
  });
});

describe("modify and override validation", () => {
  it("blocks submission when the edited payload fails the published schema", async () => {
    api.views.set("case-b", caseViewFixture());
    await desk.openCase("case-b");
    desk.updateEdit(JSON.stringify({ recommendation: "bind", execute_bind: true }));
    await desk.submitDecision("override");
    expect(api.decisions.length).toBe(0);
    expect(desk.model.selected?.editErrors.length).toBeGreaterThan(0);
  });

  it("submits a schema-valid edited payload", async () => {
    api.views.set("case-b", caseViewFixture());
    await desk.openCase("case-b");
    const view = caseViewFixture();
    const edited = {
      ...view.recommendation!,
      conditions: [...view.recommendation!.conditions, "add liquor liability"],
    };
    desk.updateEdit(JSON.stringify(edited));
    await desk.submitDecision("override");
    expect(api.decisions.length).toBe(1);
    expect(api.decisions[0]!.body.final_recommendation?.conditions).toContain(
      "add liquor liability",
    );
    expect(desk.model.selected?.outcome?.action).toBe("override");
  });
});

describe("conflict handling", () => {
  it("surfaces a 409 as case-changed and preserves the draft edits", async () => {
    api.views.set("case-b", caseViewFixture());
    await desk.openCase("case-b");
    const edits = JSON.stringify({ keep: "my edits" });
    desk.updateEdit(edits);
    api.nextDecisionError = new ApiError(409, "StaleCase", "case changed");
    await desk.submitDecision("accept");
    const selected = desk.model.selected!;
    expect(selected.conflict).toBe(true);
    expect(selected.error).toBe("case changed, reload");
    expect(selected.editedPayload).toBe(edits);
    expect(desk.canSubmit()).toBe(false);

    // Reload picks up the fresh token but keeps the reviewer's edits.
    api.views.set("case-b", caseViewFixture({ concurrency_token: "case-b:11" }));
    await desk.reloadCase();
    expect(desk.model.selected!.token).toBe("case-b:11");
    expect(desk.model.selected!.editedPayload).toBe(edits);
    expect(desk.canSubmit()).toBe(true);
  });

  it("keeps other API errors visible without the conflict banner", async () => {
    api.views.set("case-b", caseViewFixture());
    await desk.openCase("case-b");
    api.nextDecisionError = new ApiError(422, "WrongState", "not awaiting");
    await desk.submitDecision("accept");
    expect(desk.model.selected!.conflict).toBe(false);
    expect(desk.model.selected!.error).toContain("WrongState");
  });
});

describe("escalated case resolution", () => {
  it("moves the case back into the authorization queue", async () => {
    api.views.set("case-e", caseViewFixture({
      case_id: "case-e",
      state: "escalated",
      escalation_reason: "OutOfAppetite: marine cargo",
    }));
    await desk.openCase("case-e");
    expect(desk.canSubmit()).toBe(false);
    await desk.resolveEscalated();
    expect(desk.model.selected!.view.state).toBe("awaiting_human_auth");
    expect(desk.canSubmit()).toBe(true);
  });
});

describe("chat", () => {
  it("appends both sides of the exchange", async () => {
    api.views.set("case-b", caseViewFixture());
    await desk.openCase("case-b");
    await desk.askChat("why contingent?");
    expect(desk.model.selected!.chat).toEqual([
      { role: "reviewer", text: "why contingent?" },
      { role: "assistant", text: "about: why contingent?" },
    ]);
  });
});
