// Wire types for the training service API. These mirror the server's JSON
// exactly; the UI holds no state of its own beyond what these carry.

export interface CaseSummary {
  id: string;
  name: string;
  profile: string;
}

export interface Turn {
  turn_index: number;
  role: string;
  text: string;
}

export interface FeedbackWire {
  problematic_turns: number[];
  problematic_quotes: string[];
  category_id: number;
  category_name: string;
  feedback_text: string;
  refinement_status: string;
}

export interface SessionView {
  session_id: string;
  case_id: string;
  state: string;
  turns: Turn[];
  started_at: string;
  time_limit_seconds: number;
  turn_limit: number;
  remaining_seconds: number;
  remaining_turns: number;
  feedback: FeedbackWire | null;
  cases_r_phases: string[];
}

export interface ReviewRecord {
  dialogue_id: string;
  transcript: string;
  turns: Turn[];
  category_id: number;
  category_name: string;
  problematic_turns: number[];
  problematic_quotes: string[];
  refinement_status: string;
}

export interface ReviewItem {
  dialogue_id: string;
  flagged_reason: string;
  expert_feedback: string | null;
  reviewer_id: string | null;
  resolved: boolean;
  created_at: string;
  record?: ReviewRecord;
}

export interface SelfEfficacyItem {
  item_id: string;
  n_pairs: number;
  before_mean: number;
  after_mean: number;
  mean_diff: number;
  ci_low: number;
  ci_high: number;
}

export interface SelfEfficacyReport {
  items: SelfEfficacyItem[];
  n_pairs: number;
}

export type CasesRPhase = "before_feedback" | "after_feedback";
