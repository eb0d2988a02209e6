import type {
  CaseSummary,
  CasesRPhase,
  FeedbackWire,
  ReviewItem,
  SelfEfficacyReport,
  SessionView,
  Turn,
} from "./types.js";

// Every server error arrives as {"error": {"code", "message"}}; the code is
// what the UI branches on (conflict vs state_error vs validation_error).
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) {
      let code = "http_error";
      let message = `request failed with status ${response.status}`;
      try {
        const payload = await response.json();
        if (payload && payload.error) {
          code = payload.error.code ?? code;
          message = payload.error.message ?? message;
        }
      } catch {
        // non-JSON error body; keep the generic message
      }
      throw new ApiError(response.status, code, message);
    }
    return (await response.json()) as T;
  }

  listCases(): Promise<CaseSummary[]> {
    return this.request("GET", "/api/cases");
  }

  createSession(caseId: string, limits?: { time_limit_seconds?: number; turn_limit?: number }): Promise<SessionView> {
    return this.request("POST", "/api/sessions", { case_id: caseId, ...limits });
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.request("GET", `/api/sessions/${sessionId}`);
  }

  sendMessage(sessionId: string, text: string): Promise<Turn> {
    return this.request("POST", `/api/sessions/${sessionId}/messages`, { text });
  }

  finishSession(sessionId: string): Promise<FeedbackWire> {
    return this.request("POST", `/api/sessions/${sessionId}/finish`);
  }

  submitCasesR(sessionId: string, phase: CasesRPhase, ratings: number[]): Promise<unknown> {
    return this.request("POST", `/api/sessions/${sessionId}/cases-r`, { phase, ratings });
  }

  listReview(includeResolved = false): Promise<ReviewItem[]> {
    const query = includeResolved ? "?include_resolved=true" : "";
    return this.request("GET", `/api/review${query}`);
  }

  resolveReview(dialogueId: string, expertFeedback: string, reviewerId: string): Promise<ReviewItem> {
    return this.request("POST", `/api/review/${dialogueId}/resolve`, {
      expert_feedback: expertFeedback,
      reviewer_id: reviewerId,
    });
  }

  selfEfficacy(): Promise<SelfEfficacyReport> {
    return this.request("GET", "/api/reports/self-efficacy");
  }
}
