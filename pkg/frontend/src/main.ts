/** Browser entry point: wires the pure modules to the live document.
 *
 * All persistent state lives in `ui`; every change re-renders the paragraph
 * from the buffer, so the DOM is always a pure function of the state.
 */

import { ApiClient, PutOutcome } from "./client.js";
import { Edit, ViewState, applyEdit, isDirty, makeState } from "./state.js";
import {
  KEY_TO_LABEL,
  describeDiff,
  escapeHtml,
  renderBanner,
  renderConflict,
  renderParagraph,
  renderViolations,
} from "./render.js";
import { DOMINANT, LabeledParagraphJson, REFERENCE, cpLength } from "./types.js";
import { malformedReason, validateLabeled } from "./validate.js";

interface Ui {
  client: ApiClient;
  sessionId: string;
  annotator: string;
  state: ViewState | null;
  selectedSentence: number | null;
  selectedSpan: number | null;
  banner: string;
}

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
}

/** Map the current DOM selection to code-point offsets in the paragraph text.
 * Rendered segments carry data-off (their code-point start); the offset of a
 * point inside a text node is the segment offset plus the code points before
 * it.
 */
export function selectionOffsets(container: HTMLElement): [number, number] | null {
  const sel = window.getSelection();
  if (!sel || sel.rangeCount === 0 || sel.isCollapsed) return null;
  const range = sel.getRangeAt(0);
  const resolve = (node: Node, offset: number): number | null => {
    const el =
      node.nodeType === Node.TEXT_NODE ? node.parentElement : (node as HTMLElement);
    const host = el?.closest("[data-off]") as HTMLElement | null;
    if (!host || !container.contains(host)) return null;
    const base = Number(host.dataset["off"]);
    const prefix =
      node.nodeType === Node.TEXT_NODE ? (node.textContent ?? "").slice(0, offset) : "";
    return base + cpLength(prefix);
  };
  const a = resolve(range.startContainer, range.startOffset);
  const b = resolve(range.endContainer, range.endOffset);
  if (a === null || b === null || a === b) return null;
  return a < b ? [a, b] : [b, a];
}

function redraw(ui: Ui): void {
  const root = byId<HTMLDivElement>("paragraph");
  const status = byId<HTMLDivElement>("status");
  if (!ui.state) {
    root.innerHTML = renderBanner("info", "no paragraph loaded");
    status.innerHTML = ui.banner;
    return;
  }
  const violations = validateLabeled(ui.state.buffer);
  root.innerHTML = renderParagraph(ui.state.buffer, violations, {
    sentence: ui.selectedSentence ?? undefined,
    span: ui.selectedSpan ?? undefined,
  });
  const dirty = isDirty(ui.state) ? " (edited)" : "";
  byId<HTMLSpanElement>("item-id").textContent =
    `${ui.state.paragraphId} @ v${ui.state.baseVersion}${dirty}`;
  status.innerHTML = ui.banner;
}

function showEditResult(ui: Ui, result: ReturnType<typeof applyEdit>): void {
  if (result.ok) {
    ui.state = result.state;
    ui.banner = "";
  } else {
    ui.banner = renderViolations(result.violations);
  }
  redraw(ui);
}

function edit(ui: Ui, e: Edit): void {
  if (!ui.state) return;
  showEditResult(ui, applyEdit(ui.state, e));
}

async function loadNext(ui: Ui): Promise<void> {
  const next = await ui.client.nextItem(ui.sessionId);
  if (next.done) {
    ui.state = null;
    ui.banner = renderBanner("info", "all paragraphs corrected");
  } else {
    const bad = malformedReason(next.item.labeled);
    if (bad) {
      ui.state = null;
      ui.banner = renderBanner("error", `malformed payload for ${next.item.paragraph_id}: ${bad}`);
    } else {
      ui.state = makeState(next.item.paragraph_id, next.item.version, next.item.labeled);
      ui.banner = "";
    }
  }
  ui.selectedSentence = null;
  ui.selectedSpan = null;
  redraw(ui);
}

async function reload(ui: Ui): Promise<void> {
  if (!ui.state) return;
  const item = await ui.client.getItem(ui.state.paragraphId);
  ui.state = makeState(item.paragraph_id, item.version, item.labeled);
  ui.banner = "";
  redraw(ui);
}

async function submit(ui: Ui): Promise<void> {
  if (!ui.state) return;
  let outcome: PutOutcome;
  try {
    outcome = await ui.client.putItem(
      ui.state.paragraphId,
      ui.sessionId,
      ui.state.baseVersion,
      ui.state.buffer,
    );
  } catch (error) {
    ui.banner = renderBanner("error", `network failure after retries: ${String(error)}`);
    redraw(ui);
    return;
  }
  if (outcome.kind === "ok") {
    ui.banner = renderBanner("info", `saved as version ${outcome.version}`);
    await loadNext(ui);
  } else if (outcome.kind === "conflict") {
    const current = await ui.client.getItem(ui.state.paragraphId);
    ui.banner = renderConflict(
      outcome.currentVersion,
      outcome.baseVersion,
      describeDiff(ui.state.buffer, current.labeled as LabeledParagraphJson),
    );
    redraw(ui);
  } else if (outcome.kind === "invalid") {
    ui.banner = renderViolations(outcome.violations);
    redraw(ui);
  } else {
    ui.banner = renderBanner("error", `server error ${outcome.status}: ${outcome.detail}`);
    redraw(ui);
  }
}

/** Move the selected span's edge one token outward/inward. */
function nudge(ui: Ui, edge: "start" | "end", direction: -1 | 1): void {
  if (!ui.state || ui.selectedSpan === null) return;
  const lp = ui.state.buffer;
  const span = lp.spans[ui.selectedSpan];
  if (!span) return;
  const boundaries =
    edge === "start" ? lp.tokens.map((t) => t[0]) : lp.tokens.map((t) => t[1]);
  const current = edge === "start" ? span.start : span.end;
  const idx = boundaries.indexOf(current);
  const target = boundaries[idx + direction];
  if (idx === -1 || target === undefined) return;
  edit(ui, { kind: "move_span_edge", span: ui.selectedSpan, edge, pos: target });
}

function wire(ui: Ui): void {
  const root = byId<HTMLDivElement>("paragraph");

  root.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const spanEl = target.closest("[data-span]") as HTMLElement | null;
    const markEl = target.closest("[data-mark]") as HTMLElement | null;
    const sentEl = target.closest("[data-sentence]") as HTMLElement | null;
    if (markEl && spanEl && ui.state) {
      // click a mark inside its span: toggle that citation's type
      const spanIdx = Number(spanEl.dataset["span"]);
      const mark = ui.state.buffer.citation_marks[Number(markEl.dataset["mark"])];
      const span = ui.state.buffer.spans[spanIdx];
      if (mark && span) {
        const ci = span.citations.findIndex(
          (c) => c.start === mark.start && c.end === mark.end && c.bib_key === mark.bib_key,
        );
        if (ci >= 0 && event.altKey) {
          edit(ui, { kind: "toggle_citation_type", span: spanIdx, citation: ci });
          return;
        }
      }
    }
    if (spanEl) ui.selectedSpan = Number(spanEl.dataset["span"]);
    else ui.selectedSpan = null;
    if (sentEl) ui.selectedSentence = Number(sentEl.dataset["sentence"]);
    redraw(ui);
  });

  document.addEventListener("keydown", (event) => {
    if ((event.target as HTMLElement).tagName === "INPUT") return;
    const label = KEY_TO_LABEL[event.key];
    if (label && ui.selectedSentence !== null) {
      edit(ui, { kind: "relabel_sentence", sentence: ui.selectedSentence, label });
    } else if (event.key === "t" && ui.selectedSpan !== null) {
      edit(ui, { kind: "toggle_span_type", span: ui.selectedSpan });
    } else if ((event.key === "Delete" || event.key === "Backspace") && ui.selectedSpan !== null) {
      const idx = ui.selectedSpan;
      ui.selectedSpan = null;
      edit(ui, { kind: "delete_span", span: idx });
    }
  });

  byId<HTMLButtonElement>("add-dominant").addEventListener("click", () => {
    const range = selectionOffsets(root);
    if (range) edit(ui, { kind: "add_span", start: range[0], end: range[1], spanType: DOMINANT });
  });
  byId<HTMLButtonElement>("add-reference").addEventListener("click", () => {
    const range = selectionOffsets(root);
    if (range) edit(ui, { kind: "add_span", start: range[0], end: range[1], spanType: REFERENCE });
  });
  byId<HTMLButtonElement>("start-left").addEventListener("click", () => nudge(ui, "start", -1));
  byId<HTMLButtonElement>("start-right").addEventListener("click", () => nudge(ui, "start", 1));
  byId<HTMLButtonElement>("end-left").addEventListener("click", () => nudge(ui, "end", -1));
  byId<HTMLButtonElement>("end-right").addEventListener("click", () => nudge(ui, "end", 1));
  byId<HTMLButtonElement>("submit").addEventListener("click", () => void submit(ui));
  byId<HTMLButtonElement>("skip").addEventListener("click", () => void loadNext(ui));

  byId<HTMLDivElement>("status").addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.dataset["action"] === "reload") void reload(ui);
  });
}

export async function boot(): Promise<void> {
  const base = (byId<HTMLInputElement>("server-url").value || "").replace(/\/$/, "");
  const name = byId<HTMLInputElement>("annotator").value.trim();
  if (!name) {
    byId<HTMLDivElement>("status").innerHTML = renderBanner("error", "enter an annotator name");
    return;
  }
  const client = new ApiClient(base);
  const sessionId = await client.openSession(name);
  const ui: Ui = {
    client,
    sessionId,
    annotator: name,
    state: null,
    selectedSentence: null,
    selectedSpan: null,
    banner: "",
  };
  byId<HTMLDivElement>("login").hidden = true;
  byId<HTMLDivElement>("workbench").hidden = false;
  byId<HTMLSpanElement>("who").textContent = escapeHtml(name);
  wire(ui);
  await loadNext(ui);
}

if (typeof document !== "undefined" && document.getElementById("login")) {
  byId<HTMLButtonElement>("connect").addEventListener("click", () => void boot());
}
