import type { FeedbackWire, Turn } from "./types.js";

// Placeholder wording for the 8 questionnaire items; the instrument's exact
// text is licensed separately and should replace these labels verbatim.
// Item ids and order must match the server's CASES_R_ITEMS.
export const CASES_R_ITEMS: ReadonlyArray<{ id: string; label: string }> = [
  { id: "attending", label: "Attend to the client without drifting" },
  { id: "restatement", label: "Restate what the client said accurately" },
  { id: "open_questions", label: "Ask open questions that invite detail" },
  { id: "reflection_of_feelings", label: "Reflect the client's feelings" },
  { id: "challenges", label: "Challenge unhelpful patterns respectfully" },
  { id: "interpretations", label: "Offer interpretations that fit the material" },
  { id: "information_giving", label: "Give information at the right moment" },
  { id: "direct_guidance", label: "Give direct guidance without taking over" },
];

export const RATING_MIN = 1;
export const RATING_MAX = 6;

// "14:59"-style countdown; never goes below zero.
export function formatClock(totalSeconds: number): string {
  const clamped = Math.max(0, Math.floor(totalSeconds));
  const minutes = Math.floor(clamped / 60);
  const seconds = clamped % 60;
  return `${String(minutes).padStart(2, "0")}:${String(seconds).padStart(2, "0")}`;
}

// Highlighted turns are exactly the feedback's problematic turns. Negative
// ids mark quotes that matched no turn; they have nothing to highlight.
export function highlightedTurns(feedback: FeedbackWire | null): Set<number> {
  if (!feedback) return new Set();
  return new Set(feedback.problematic_turns.filter((t) => t > 0));
}

// Submit stays disabled until every item carries a rating in range.
export function casesRReady(ratings: Array<number | null>): boolean {
  if (ratings.length !== CASES_R_ITEMS.length) return false;
  return ratings.every((r) => r !== null && Number.isInteger(r) && r >= RATING_MIN && r <= RATING_MAX);
}

export function nextTurnIndex(turns: Turn[]): number {
  return turns.length === 0 ? 1 : turns[turns.length - 1].turn_index + 1;
}

export function sessionOver(state: string): boolean {
  return state === "completed" || state === "expired";
}

// Chat input is usable only while the session is active with budget left.
export function canSendMessage(state: string, remainingSeconds: number, remainingTurns: number): boolean {
  return state === "active" && remainingSeconds > 0 && remainingTurns > 0;
}
