/** Wire types for the session-service HTTP API. */

export type StepKind = "update" | "feedback";

export interface SessionInfo {
  sessionId: string;
  createdAt: string;
}

export interface UpdateResponse {
  ecore: string;
  warnings: string[];
}

/** One row of GET /sessions/{id}/history, rendered verbatim. */
export interface HistoryRow {
  step: string;
  requirementCount: number;
  promptTokens: number;
  completionTokens: number;
  tokens: number;
  wallSeconds: number;
  warnings: string[];
}

export interface CategoryScore {
  matched: number;
  total: number;
  missing: string[];
  extra: string[];
}

export interface ComparisonReport {
  classes: CategoryScore;
  attributes: CategoryScore;
  compositions: CategoryScore;
  subclassRelations: CategoryScore;
  notes: string[];
}

/** API failure carrying the HTTP status so the UI can keep drafts on 409/422. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}
