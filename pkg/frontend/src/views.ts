import {
  CASES_R_ITEMS,
  RATING_MAX,
  RATING_MIN,
  casesRReady,
  formatClock,
  highlightedTurns,
} from "./model.js";
import type { CaseSummary, CasesRPhase, FeedbackWire, ReviewItem, Turn } from "./types.js";

type Child = Node | string;

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: Child[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export function renderBanner(message: string): HTMLElement {
  const banner = el("div", { class: "banner", role: "alert" }, message);
  const dismiss = el("button", { type: "button", class: "banner-dismiss" }, "dismiss");
  dismiss.addEventListener("click", () => banner.remove());
  banner.append(dismiss);
  return banner;
}

export function renderCaseList(cases: CaseSummary[], onPick: (caseId: string) => void): HTMLElement {
  const section = el("section", { class: "case-list" }, el("h2", {}, "Choose a client"));
  for (const c of cases) {
    const card = el(
      "button",
      { type: "button", class: "case-card", "data-case-id": c.id },
      el("strong", {}, c.name),
      el("span", { class: "case-profile" }, c.profile),
    );
    card.addEventListener("click", () => onPick(c.id));
    section.append(card);
  }
  return section;
}

// Transcript order always equals server turn order; flagged turns carry the
// .flagged class so tests and styling agree on what counts as highlighted.
export function renderTranscript(turns: Turn[], feedback: FeedbackWire | null): HTMLOListElement {
  const highlights = highlightedTurns(feedback);
  const list = el("ol", { class: "transcript" });
  for (const turn of turns) {
    const classes = ["turn", turn.role];
    if (highlights.has(turn.turn_index)) classes.push("flagged");
    list.append(
      el(
        "li",
        { class: classes.join(" "), "data-turn-index": String(turn.turn_index) },
        el("span", { class: "turn-role" }, `[${turn.turn_index}] ${turn.role}`),
        el("span", { class: "turn-text" }, turn.text),
      ),
    );
  }
  return list;
}

export interface ChatControlsModel {
  remainingSeconds: number;
  remainingTurns: number;
  canSend: boolean;
}

export function renderChatControls(
  model: ChatControlsModel,
  onSend: (text: string) => void,
  onEnd: () => void,
): HTMLElement {
  const clock = el("span", { class: "clock", id: "clock" }, formatClock(model.remainingSeconds));
  const turnsLeft = el("span", { class: "turns-left" }, `${model.remainingTurns} turns left`);
  const input = el("input", {
    type: "text",
    id: "message-input",
    placeholder: "Say something as the therapist...",
  });
  const send = el("button", { type: "button", id: "send" }, "Send");
  const end = el("button", { type: "button", id: "end-session" }, "End session");
  if (!model.canSend) {
    input.disabled = true;
    send.disabled = true;
  }
  const submit = () => {
    const text = input.value.trim();
    if (!text || input.disabled) return;
    input.value = "";
    onSend(text);
  };
  send.addEventListener("click", submit);
  input.addEventListener("keydown", (event) => {
    if (event.key === "Enter") submit();
  });
  end.addEventListener("click", onEnd);
  return el(
    "div",
    { class: "chat-controls" },
    el("div", { class: "budget" }, clock, " ", turnsLeft),
    el("div", { class: "composer" }, input, send, end),
  );
}

export function renderCasesRForm(phase: CasesRPhase, onSubmit: (ratings: number[]) => void): HTMLElement {
  const heading = phase === "before_feedback" ? "Before the feedback" : "After the feedback";
  const form = el(
    "form",
    { class: "cases-r", "data-phase": phase },
    el("h3", {}, `${heading}: how confident are you?`),
    el("p", { class: "scale-hint" }, `Rate each skill from ${RATING_MIN} (no confidence) to ${RATING_MAX} (complete confidence).`),
  );
  for (const item of CASES_R_ITEMS) {
    const fieldset = el("fieldset", { "data-item-id": item.id }, el("legend", {}, item.label));
    for (let value = RATING_MIN; value <= RATING_MAX; value++) {
      const label = el("label", { class: "rating" });
      const radio = el("input", { type: "radio", name: item.id, value: String(value) });
      label.append(radio, String(value));
      fieldset.append(label);
    }
    form.append(fieldset);
  }
  const submit = el("button", { type: "submit", class: "submit-ratings" }, "Submit ratings");
  submit.disabled = true;
  form.append(submit);

  const currentRatings = (): Array<number | null> =>
    CASES_R_ITEMS.map((item) => {
      const checked = form.querySelector<HTMLInputElement>(`input[name="${item.id}"]:checked`);
      return checked ? Number(checked.value) : null;
    });

  form.addEventListener("change", () => {
    submit.disabled = !casesRReady(currentRatings());
  });
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const ratings = currentRatings();
    if (!casesRReady(ratings)) return;
    onSubmit(ratings as number[]);
  });
  return form;
}

export function renderFeedbackPane(feedback: FeedbackWire, onAcknowledge: () => void): HTMLElement {
  const pane = el(
    "section",
    { class: "feedback-pane" },
    el("h3", {}, "Supervisor feedback"),
    el("span", { class: "category-badge" }, feedback.category_name),
    el("p", { class: "feedback-text" }, feedback.feedback_text),
  );
  const ack = el("button", { type: "button", class: "acknowledge" }, "I have read the feedback");
  ack.addEventListener(
    "click",
    () => {
      ack.disabled = true;
      onAcknowledge();
    },
    { once: true },
  );
  pane.append(ack);
  return pane;
}

export function renderReviewList(items: ReviewItem[], onOpen: (item: ReviewItem) => void): HTMLElement {
  const section = el("section", { class: "review-list" }, el("h2", {}, "Escalated samples"));
  if (items.length === 0) {
    section.append(el("p", { class: "queue-empty" }, "The review queue is empty."));
    return section;
  }
  for (const item of items) {
    const row = el(
      "button",
      { type: "button", class: "review-row", "data-dialogue-id": item.dialogue_id },
      el("strong", {}, item.dialogue_id),
      el("span", { class: "reason" }, item.flagged_reason),
    );
    row.addEventListener("click", () => onOpen(item));
    section.append(row);
  }
  return section;
}

export function renderReviewDetail(
  item: ReviewItem,
  onResolve: (expertFeedback: string, reviewerId: string) => void,
): HTMLElement {
  const section = el(
    "section",
    { class: "review-detail", "data-dialogue-id": item.dialogue_id },
    el("h2", {}, item.dialogue_id),
    el("p", { class: "reason" }, `Flagged: ${item.flagged_reason}`),
  );
  if (item.record) {
    section.append(
      el("p", { class: "category" }, `Category: ${item.record.category_name}`),
      renderTranscript(item.record.turns, {
        problematic_turns: item.record.problematic_turns,
        problematic_quotes: item.record.problematic_quotes,
        category_id: item.record.category_id,
        category_name: item.record.category_name,
        feedback_text: "",
        refinement_status: item.record.refinement_status,
      }),
    );
  }
  const textarea = el("textarea", {
    class: "expert-feedback",
    placeholder: "Write the refined feedback...",
  });
  const reviewer = el("input", { type: "text", class: "reviewer-id", placeholder: "Reviewer id" });
  const resolve = el("button", { type: "button", class: "resolve" }, "Resolve");
  resolve.disabled = true;
  const refresh = () => {
    resolve.disabled = textarea.value.trim() === "" || reviewer.value.trim() === "";
  };
  textarea.addEventListener("input", refresh);
  reviewer.addEventListener("input", refresh);
  resolve.addEventListener("click", () => onResolve(textarea.value.trim(), reviewer.value.trim()));
  section.append(textarea, reviewer, resolve);
  return section;
}
