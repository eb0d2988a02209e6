import { describe, expect, it, vi } from "vitest";
import {
  renderCaseList,
  renderCasesRForm,
  renderChatControls,
  renderFeedbackPane,
  renderReviewDetail,
  renderTranscript,
} from "../src/views.js";
import type { FeedbackWire, ReviewItem, Turn } from "../src/types.js";

const TURNS: Turn[] = [
  { turn_index: 1, role: "therapist", text: "You should stop worrying." },
  { turn_index: 2, role: "client", text: "I suppose." },
  { turn_index: 3, role: "therapist", text: "What happens in your body?" },
  { turn_index: 4, role: "client", text: "My chest gets tight." },
];

const FEEDBACK: FeedbackWire = {
  problematic_turns: [1],
  problematic_quotes: ["You should stop worrying."],
  category_id: 2,
  category_name: "Premature Advice Giving",
  feedback_text: "Hold the advice until the worry is explored.",
  refinement_status: "none",
};

describe("renderTranscript", () => {
  it("keeps server turn order", () => {
    const list = renderTranscript(TURNS, null);
    const indexes = [...list.querySelectorAll("li")].map((li) => li.dataset.turnIndex);
    expect(indexes).toEqual(["1", "2", "3", "4"]);
  });

  it("flags exactly the problematic turns", () => {
    const list = renderTranscript(TURNS, FEEDBACK);
    const flagged = [...list.querySelectorAll("li.flagged")].map((li) => li.dataset.turnIndex);
    expect(flagged).toEqual(["1"]);
  });
});

describe("renderCaseList", () => {
  it("invokes the pick handler with the case id", () => {
    const onPick = vi.fn();
    const section = renderCaseList(
      [
        { id: "case-001", name: "Dana", profile: "deadline worry" },
        { id: "case-002", name: "Marcus", profile: "grief" },
      ],
      onPick,
    );
    section.querySelector<HTMLButtonElement>('[data-case-id="case-002"]')!.click();
    expect(onPick).toHaveBeenCalledWith("case-002");
  });
});

describe("renderChatControls", () => {
  it("disables the composer when sending is not allowed", () => {
    const controls = renderChatControls(
      { remainingSeconds: 0, remainingTurns: 3, canSend: false },
      () => {},
      () => {},
    );
    expect(controls.querySelector<HTMLInputElement>("#message-input")!.disabled).toBe(true);
    expect(controls.querySelector<HTMLButtonElement>("#send")!.disabled).toBe(true);
    expect(controls.querySelector<HTMLButtonElement>("#end-session")!.disabled).toBe(false);
  });

  it("trims the draft and clears the input on send", () => {
    const onSend = vi.fn();
    const controls = renderChatControls(
      { remainingSeconds: 600, remainingTurns: 3, canSend: true },
      onSend,
      () => {},
    );
    const input = controls.querySelector<HTMLInputElement>("#message-input")!;
    input.value = "  hello there  ";
    controls.querySelector<HTMLButtonElement>("#send")!.click();
    expect(onSend).toHaveBeenCalledWith("hello there");
    expect(input.value).toBe("");
  });

  it("ignores empty drafts", () => {
    const onSend = vi.fn();
    const controls = renderChatControls(
      { remainingSeconds: 600, remainingTurns: 3, canSend: true },
      onSend,
      () => {},
    );
    controls.querySelector<HTMLButtonElement>("#send")!.click();
    expect(onSend).not.toHaveBeenCalled();
  });
});

describe("renderCasesRForm", () => {
  function rateAll(form: HTMLElement, value: number): void {
    for (const fieldset of form.querySelectorAll("fieldset")) {
      fieldset.querySelector<HTMLInputElement>(`input[value="${value}"]`)!.click();
    }
  }

  it("keeps submit disabled until every item is rated", () => {
    const onSubmit = vi.fn();
    const form = renderCasesRForm("before_feedback", onSubmit);
    document.body.append(form);
    const submit = form.querySelector<HTMLButtonElement>(".submit-ratings")!;
    expect(submit.disabled).toBe(true);

    const fieldsets = [...form.querySelectorAll("fieldset")];
    for (const fieldset of fieldsets.slice(0, -1)) {
      fieldset.querySelector<HTMLInputElement>('input[value="4"]')!.click();
    }
    expect(submit.disabled).toBe(true);

    fieldsets[fieldsets.length - 1].querySelector<HTMLInputElement>('input[value="4"]')!.click();
    expect(submit.disabled).toBe(false);
    form.remove();
  });

  it("submits the ratings in item order", () => {
    const onSubmit = vi.fn();
    const form = renderCasesRForm("after_feedback", onSubmit);
    document.body.append(form);
    rateAll(form, 5);
    form.dispatchEvent(new Event("submit", { cancelable: true }));
    expect(onSubmit).toHaveBeenCalledWith([5, 5, 5, 5, 5, 5, 5, 5]);
    form.remove();
  });
});

describe("renderFeedbackPane", () => {
  it("shows the category and fires the acknowledgement once", () => {
    const onAck = vi.fn();
    const pane = renderFeedbackPane(FEEDBACK, onAck);
    expect(pane.querySelector(".category-badge")!.textContent).toBe("Premature Advice Giving");
    const ack = pane.querySelector<HTMLButtonElement>(".acknowledge")!;
    ack.click();
    ack.click();
    expect(onAck).toHaveBeenCalledTimes(1);
  });
});

describe("renderReviewDetail", () => {
  const ITEM: ReviewItem = {
    dialogue_id: "dlg-escalated-1",
    flagged_reason: "vgr_escalation",
    expert_feedback: null,
    reviewer_id: null,
    resolved: false,
    created_at: "2026-08-14T00:00:00Z",
    record: {
      dialogue_id: "dlg-escalated-1",
      transcript: "[1] therapist: You should stop worrying.",
      turns: TURNS,
      category_id: 2,
      category_name: "Premature Advice Giving",
      problematic_turns: [1],
      problematic_quotes: [],
      refinement_status: "need_human",
    },
  };

  it("enables resolve only once feedback and reviewer are filled", () => {
    const onResolve = vi.fn();
    const detail = renderReviewDetail(ITEM, onResolve);
    document.body.append(detail);
    const resolve = detail.querySelector<HTMLButtonElement>(".resolve")!;
    const textarea = detail.querySelector<HTMLTextAreaElement>(".expert-feedback")!;
    const reviewer = detail.querySelector<HTMLInputElement>(".reviewer-id")!;
    expect(resolve.disabled).toBe(true);

    textarea.value = "Name the feeling before advising.";
    textarea.dispatchEvent(new Event("input", { bubbles: true }));
    expect(resolve.disabled).toBe(true);

    reviewer.value = "expert-7";
    reviewer.dispatchEvent(new Event("input", { bubbles: true }));
    expect(resolve.disabled).toBe(false);

    resolve.click();
    expect(onResolve).toHaveBeenCalledWith("Name the feeling before advising.", "expert-7");
    detail.remove();
  });

  it("shows the flagged transcript", () => {
    const detail = renderReviewDetail(ITEM, () => {});
    const flagged = [...detail.querySelectorAll("li.flagged")].map(
      (li) => (li as HTMLElement).dataset.turnIndex,
    );
    expect(flagged).toEqual(["1"]);
  });
});
