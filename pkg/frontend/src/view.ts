/**
 * Session view-model: everything the page shows, with no DOM attached.
 *
 * The view performs zero metamodel logic — the diagram source, the export
 * payloads and every history cell are byte-for-byte API responses. One
 * mutation may be in flight at a time, mirroring the server's per-session
 * serialization; a rejected submission keeps the draft text so the expert
 * can correct and resend it.
 */

import type { ApiClient } from "./api.js";
import { ApiError, type HistoryRow, type StepKind } from "./types.js";

export interface SessionView {
  sessionId: string;
  diagramSource: string;
  historyRows: HistoryRow[];
  warnings: string[];
  errorMessage: string | null;
  pending: boolean;
}

export type ViewListener = (view: SessionView) => void;

export class SessionViewModel {
  private sessionId = "";
  private diagramSource = "";
  private historyRows: HistoryRow[] = [];
  private warnings: string[] = [];
  private errorMessage: string | null = null;
  private pending = false;
  private listeners: ViewListener[] = [];

  constructor(private readonly api: ApiClient) {}

  snapshot(): SessionView {
    return {
      sessionId: this.sessionId,
      diagramSource: this.diagramSource,
      historyRows: this.historyRows,
      warnings: this.warnings,
      errorMessage: this.errorMessage,
      pending: this.pending,
    };
  }

  onChange(listener: ViewListener): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    const view = this.snapshot();
    for (const listener of this.listeners) listener(view);
  }

  async start(): Promise<SessionView> {
    const info = await this.api.createSession();
    this.sessionId = info.sessionId;
    await this.refresh();
    return this.snapshot();
  }

  /** Re-fetch diagram and history; never computes metrics client-side. */
  async refresh(): Promise<void> {
    this.diagramSource = await this.api.getMetamodel(this.sessionId, "puml");
    this.historyRows = await this.api.getHistory(this.sessionId);
    this.notify();
  }

  canSubmit(text: string): boolean {
    return !this.pending && text.trim().length > 0;
  }

  /**
   * Submit requirements or feedback. Resolves to true when the model was
   * updated; false when the server rejected the input (the caller keeps
   * the draft and shows `errorMessage`).
   */
  async submitRequirements(text: string, step: StepKind): Promise<boolean> {
    if (!this.canSubmit(text)) {
      throw new Error(this.pending ? "a submission is already in flight" : "requirements are empty");
    }
    this.pending = true;
    this.errorMessage = null;
    this.notify();
    try {
      const result = await this.api.updateMetamodel(this.sessionId, text, step);
      this.warnings = result.warnings;
      await this.refresh();
      return true;
    } catch (error) {
      if (error instanceof ApiError) {
        this.errorMessage = error.detail;
        this.notify();
        return false;
      }
      this.errorMessage = error instanceof Error ? error.message : String(error);
      this.notify();
      return false;
    } finally {
      this.pending = false;
      this.notify();
    }
  }

  /** Export payloads are the raw documents served by the API. */
  async exportDocument(format: "ecore" | "puml"): Promise<{ filename: string; content: string }> {
    const content = await this.api.getMetamodel(this.sessionId, format);
    return { filename: `metamodel.${format === "puml" ? "puml" : "ecore"}`, content };
  }
}

/** Table-2-shaped cells for the history panel, one row per iteration. */
export function historyCells(rows: HistoryRow[]): string[][] {
  return rows.map((row) => [
    row.step,
    String(row.requirementCount),
    String(row.tokens),
    row.wallSeconds.toFixed(2),
  ]);
}
