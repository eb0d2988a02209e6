import { ApiClient, ApiError } from "./api.js";
import { canSendMessage, formatClock, nextTurnIndex } from "./model.js";
import type { ReviewItem, SessionView, Turn } from "./types.js";
import {
  el,
  renderBanner,
  renderCaseList,
  renderCasesRForm,
  renderChatControls,
  renderFeedbackPane,
  renderReviewDetail,
  renderReviewList,
  renderTranscript,
} from "./views.js";

// Single-page controller. All state lives on the server; this class only
// caches the last SessionView it saw and re-renders from it.
export class App {
  private session: SessionView | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly root: HTMLElement,
    readonly api: ApiClient,
  ) {}

  dispose(): void {
    this.stopClock();
  }

  currentSession(): SessionView | null {
    return this.session;
  }

  async route(hash: string): Promise<void> {
    if (hash.startsWith("#/review")) {
      await this.showReview();
    } else {
      await this.showCases();
    }
  }

  private clear(): void {
    this.stopClock();
    this.root.replaceChildren();
  }

  private stopClock(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  private banner(message: string): void {
    this.root.querySelector(".banner")?.remove();
    this.root.prepend(renderBanner(message));
  }

  private fail(err: unknown): void {
    const message = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    this.banner(message);
  }

  // -- practice flow -------------------------------------------------------

  async showCases(): Promise<void> {
    this.clear();
    try {
      const cases = await this.api.listCases();
      this.root.append(renderCaseList(cases, (caseId) => void this.startSession(caseId)));
    } catch (err) {
      this.fail(err);
    }
  }

  async startSession(caseId: string): Promise<void> {
    try {
      this.session = await this.api.createSession(caseId);
    } catch (err) {
      this.fail(err);
      return;
    }
    this.renderSession();
  }

  async resumeSession(sessionId: string): Promise<void> {
    this.session = await this.api.getSession(sessionId);
    this.renderSession();
  }

  // Re-entry point after any state change: pick the screen from the session
  // state the server reports, so a page reload lands in the right place.
  renderSession(): void {
    const s = this.session;
    if (!s) return;
    if (s.state === "completed") {
      if (s.cases_r_phases.includes("after_feedback")) {
        this.showDone();
      } else if (s.feedback) {
        this.showFeedback();
      }
      return;
    }
    if (s.state === "awaiting_feedback") {
      void this.finish();
      return;
    }
    this.showChat();
  }

  private showChat(): void {
    const s = this.session;
    if (!s) return;
    this.clear();
    const transcript = renderTranscript(s.turns, null);
    const controls = renderChatControls(
      {
        remainingSeconds: s.remaining_seconds,
        remainingTurns: s.remaining_turns,
        canSend: canSendMessage(s.state, s.remaining_seconds, s.remaining_turns),
      },
      (text) => void this.send(text),
      () => this.showBeforeForm(),
    );
    this.root.append(el("h2", {}, `Session with ${s.case_id}`), transcript, controls);
    this.startClock(s.remaining_seconds);
  }

  private startClock(remainingSeconds: number): void {
    this.stopClock();
    const deadline = Date.now() + remainingSeconds * 1000;
    this.timer = setInterval(() => {
      const clock = this.root.querySelector("#clock");
      if (!clock) return;
      const left = (deadline - Date.now()) / 1000;
      clock.textContent = formatClock(left);
      if (left <= 0) {
        this.stopClock();
        const input = this.root.querySelector<HTMLInputElement>("#message-input");
        const send = this.root.querySelector<HTMLButtonElement>("#send");
        if (input) input.disabled = true;
        if (send) send.disabled = true;
      }
    }, 1000);
  }

  // Optimistic send: the trainee turn shows immediately and is rolled back
  // if the server rejects it.
  async send(text: string): Promise<void> {
    const s = this.session;
    if (!s) return;
    const optimistic: Turn = { turn_index: nextTurnIndex(s.turns), role: "therapist", text };
    s.turns.push(optimistic);
    this.showChat();
    try {
      const reply = await this.api.sendMessage(s.session_id, text);
      s.turns.push(reply);
      this.session = await this.api.getSession(s.session_id);
    } catch (err) {
      s.turns.pop();
      this.session = s;
      this.renderSession();
      this.fail(err);
      return;
    }
    this.renderSession();
  }

  private showBeforeForm(): void {
    const s = this.session;
    if (!s) return;
    this.clear();
    this.root.append(
      el("h2", {}, "Session paused for the questionnaire"),
      renderTranscript(s.turns, null),
      renderCasesRForm("before_feedback", (ratings) => void this.submitBefore(ratings)),
    );
  }

  private async submitBefore(ratings: number[]): Promise<void> {
    const s = this.session;
    if (!s) return;
    try {
      await this.api.submitCasesR(s.session_id, "before_feedback", ratings);
    } catch (err) {
      // already submitted is fine on a retry; anything else surfaces
      if (!(err instanceof ApiError && err.code === "conflict")) {
        this.fail(err);
        return;
      }
    }
    await this.finish();
  }

  private async finish(): Promise<void> {
    const s = this.session;
    if (!s) return;
    try {
      await this.api.finishSession(s.session_id);
      this.session = await this.api.getSession(s.session_id);
    } catch (err) {
      this.fail(err);
      return;
    }
    this.showFeedback();
  }

  private showFeedback(): void {
    const s = this.session;
    if (!s || !s.feedback) return;
    this.clear();
    this.root.append(
      el("h2", {}, "Review the highlighted turns"),
      renderTranscript(s.turns, s.feedback),
      renderFeedbackPane(s.feedback, () => this.showAfterForm()),
    );
  }

  private showAfterForm(): void {
    this.clear();
    this.root.append(renderCasesRForm("after_feedback", (ratings) => void this.submitAfter(ratings)));
  }

  private async submitAfter(ratings: number[]): Promise<void> {
    const s = this.session;
    if (!s) return;
    try {
      await this.api.submitCasesR(s.session_id, "after_feedback", ratings);
      this.session = await this.api.getSession(s.session_id);
    } catch (err) {
      this.fail(err);
      return;
    }
    this.showDone();
  }

  private showDone(): void {
    this.clear();
    const again = el("button", { type: "button", id: "new-session" }, "Practice with another client");
    again.addEventListener("click", () => void this.showCases());
    this.root.append(
      el("section", { class: "session-done" }, el("h2", {}, "Session complete"), again),
    );
  }

  // -- review console --------------------------------------------------------

  async showReview(): Promise<void> {
    this.clear();
    try {
      const items = await this.api.listReview();
      this.root.append(renderReviewList(items, (item) => this.showReviewDetail(item)));
    } catch (err) {
      this.fail(err);
    }
  }

  showReviewDetail(item: ReviewItem): void {
    this.clear();
    this.root.append(
      renderReviewDetail(item, (feedback, reviewer) => void this.resolve(item, feedback, reviewer)),
    );
  }

  private async resolve(item: ReviewItem, feedback: string, reviewer: string): Promise<void> {
    try {
      await this.api.resolveReview(item.dialogue_id, feedback, reviewer);
    } catch (err) {
      if (err instanceof ApiError && err.code === "conflict") {
        await this.showReview();
        this.banner("Someone else resolved this sample; the queue was refreshed.");
        return;
      }
      this.fail(err);
      return;
    }
    await this.showReview();
  }
}
