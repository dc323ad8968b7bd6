/** Thin typed client for the session-service API. No state, no retries. */

import {
  ApiError,
  type ComparisonReport,
  type HistoryRow,
  type SessionInfo,
  type StepKind,
  type UpdateResponse,
} from "./types.js";

async function errorDetail(response: Response): Promise<string> {
  const text = await response.text();
  try {
    const body = JSON.parse(text) as { detail?: unknown };
    if (typeof body.detail === "string") return body.detail;
    if (Array.isArray(body.detail)) return body.detail.join("; ");
  } catch {
    // not JSON: fall through to the raw text
  }
  return text || response.statusText;
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  private async checked(response: Response): Promise<Response> {
    if (!response.ok) {
      throw new ApiError(response.status, await errorDetail(response));
    }
    return response;
  }

  async createSession(): Promise<SessionInfo> {
    const response = await this.checked(
      await fetch(this.url("/sessions"), { method: "POST" }),
    );
    return (await response.json()) as SessionInfo;
  }

  async updateMetamodel(
    sessionId: string,
    requirements: string,
    step: StepKind,
  ): Promise<UpdateResponse> {
    const response = await this.checked(
      await fetch(this.url(`/sessions/${encodeURIComponent(sessionId)}/updateMetamodel`), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ requirements, step }),
      }),
    );
    return (await response.json()) as UpdateResponse;
  }

  /** Raw document text; exports must stay byte-identical to this. */
  async getMetamodel(sessionId: string, format: "ecore" | "puml"): Promise<string> {
    const response = await this.checked(
      await fetch(
        this.url(`/sessions/${encodeURIComponent(sessionId)}/metamodel?format=${format}`),
      ),
    );
    return await response.text();
  }

  async getHistory(sessionId: string): Promise<HistoryRow[]> {
    const response = await this.checked(
      await fetch(this.url(`/sessions/${encodeURIComponent(sessionId)}/history`)),
    );
    return (await response.json()) as HistoryRow[];
  }

  async evaluate(candidateEcore: string, referenceEcore: string): Promise<ComparisonReport> {
    const response = await this.checked(
      await fetch(this.url("/evaluate"), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ candidateEcore, referenceEcore }),
      }),
    );
    return (await response.json()) as ComparisonReport;
  }
}
