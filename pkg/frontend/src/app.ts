/** Browser entry point: wires the view-model to the static page. */

import { ApiClient } from "./api.js";
import { renderDiagram } from "./diagram.js";
import { historyCells, SessionViewModel, type SessionView } from "./view.js";
import type { StepKind } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function download(filename: string, content: string, mime: string): void {
  const blob = new Blob([content], { type: mime });
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = filename;
  anchor.click();
  URL.revokeObjectURL(url);
}

function escapeHtml(text: string): string {
  const div = document.createElement("div");
  div.textContent = text;
  return div.innerHTML;
}

export function bootstrap(): void {
  // Served under /ui by the session service; the API lives at the root.
  const api = new ApiClient(new URL("..", window.location.href).pathname.replace(/\/ui\/?$/, ""));
  const model = new SessionViewModel(api);

  const draft = el<HTMLTextAreaElement>("draft");
  const submitUpdate = el<HTMLButtonElement>("submit-update");
  const submitFeedback = el<HTMLButtonElement>("submit-feedback");
  const diagramPanel = el<HTMLDivElement>("diagram");
  const historyBody = el<HTMLTableSectionElement>("history-body");
  const warningsPanel = el<HTMLUListElement>("warnings");
  const errorBanner = el<HTMLDivElement>("error-banner");
  const sessionLabel = el<HTMLSpanElement>("session-id");

  function renderView(view: SessionView): void {
    sessionLabel.textContent = view.sessionId;

    const rendered = renderDiagram(view.diagramSource);
    if (rendered.ok) {
      diagramPanel.innerHTML = rendered.svg;
    } else {
      diagramPanel.innerHTML =
        `<p class="fallback-note">render failed (${escapeHtml(rendered.reason)}); showing source</p>` +
        `<pre>${escapeHtml(rendered.fallbackText)}</pre>`;
    }

    historyBody.innerHTML = historyCells(view.historyRows)
      .map((cells) => `<tr>${cells.map((c) => `<td>${escapeHtml(c)}</td>`).join("")}</tr>`)
      .join("");

    warningsPanel.innerHTML = view.warnings
      .map((w) => `<li>${escapeHtml(w)}</li>`)
      .join("");
    warningsPanel.parentElement!.classList.toggle("hidden", view.warnings.length === 0);

    errorBanner.textContent = view.errorMessage ?? "";
    errorBanner.classList.toggle("hidden", view.errorMessage === null);

    const busy = view.pending;
    submitUpdate.disabled = busy || !draft.value.trim();
    submitFeedback.disabled = busy || !draft.value.trim();
  }

  model.onChange(renderView);

  draft.addEventListener("input", () => {
    const ok = model.canSubmit(draft.value);
    submitUpdate.disabled = !ok;
    submitFeedback.disabled = !ok;
  });

  async function submit(step: StepKind): Promise<void> {
    const accepted = await model.submitRequirements(draft.value, step);
    if (accepted) draft.value = "";  // rejected submissions keep the draft
  }

  submitUpdate.addEventListener("click", () => void submit("update"));
  submitFeedback.addEventListener("click", () => void submit("feedback"));

  el<HTMLButtonElement>("export-ecore").addEventListener("click", () => {
    void model.exportDocument("ecore").then(({ filename, content }) =>
      download(filename, content, "application/xml"),
    );
  });
  el<HTMLButtonElement>("export-puml").addEventListener("click", () => {
    void model.exportDocument("puml").then(({ filename, content }) =>
      download(filename, content, "text/plain"),
    );
  });

  void model.start().catch((error) => {
    errorBanner.textContent = `failed to start session: ${error}`;
    errorBanner.classList.remove("hidden");
  });
}

bootstrap();
