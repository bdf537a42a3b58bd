/** Pure HTML renderers: state in, markup string out.
 *
 * Keeping these free of DOM access makes the whole presentation layer
 * testable under node; main.ts owns the live document.
 */

import {
  DISCOURSE_LABELS,
  DOMINANT,
  DiscourseLabel,
  LabeledParagraphJson,
  Violation,
  codePoints,
} from "./types.js";

/** One distinct color per discourse label. */
export const LABEL_COLORS: Record<DiscourseLabel, string> = {
  single_summ: "#1f77b4",
  multi_summ: "#ff7f0e",
  narrative_cite: "#2ca02c",
  reflection: "#d62728",
  transition: "#9467bd",
  other: "#7f7f7f",
};

/** Digit keys 1-6 relabel the selected sentence. */
export const KEY_TO_LABEL: Record<string, DiscourseLabel> = Object.fromEntries(
  DISCOURSE_LABELS.map((label, i) => [String(i + 1), label]),
) as Record<string, DiscourseLabel>;

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

interface Segment {
  start: number;
  end: number;
  span: number;
  mark: number;
}

/** Split [start,end) into maximal runs with constant (span, mark) membership. */
function segments(lp: LabeledParagraphJson, start: number, end: number): Segment[] {
  const spanAt = (pos: number): number =>
    lp.spans.findIndex((s) => s.start <= pos && pos < s.end);
  const markAt = (pos: number): number =>
    lp.citation_marks.findIndex((m) => m.start <= pos && pos < m.end);
  const out: Segment[] = [];
  let cur: Segment | null = null;
  for (let pos = start; pos < end; pos++) {
    const span = spanAt(pos);
    const mark = markAt(pos);
    if (cur && cur.span === span && cur.mark === mark) {
      cur.end = pos + 1;
    } else {
      cur = { start: pos, end: pos + 1, span, mark };
      out.push(cur);
    }
  }
  return out;
}

function invalidSpans(violations: Violation[]): Set<number> {
  const bad = new Set<number>();
  for (const v of violations) {
    if (v.span_index !== null && v.span_index !== undefined) bad.add(v.span_index);
  }
  return bad;
}

/** The paragraph as sentence rows: a colored label badge plus the sentence
 * text with span and mark wrappers carrying data- attributes for event
 * delegation.  Every text segment records its code-point offset so the DOM
 * selection can be mapped back to schema offsets.
 */
export function renderParagraph(
  lp: LabeledParagraphJson,
  violations: Violation[] = [],
  selection?: { sentence?: number; span?: number },
): string {
  const cps = codePoints(lp.text);
  const bad = invalidSpans(violations);
  const rows = lp.sentences.map(([s, e], i) => {
    const label = lp.sentence_labels[i] ?? "other";
    const color = LABEL_COLORS[label as DiscourseLabel] ?? LABEL_COLORS.other;
    const picked = selection?.sentence === i ? " selected" : "";
    const parts = segments(lp, s, e).map((seg) => {
      const text = escapeHtml(cps.slice(seg.start, seg.end).join(""));
      let inner =
        seg.mark >= 0
          ? `<span class="mark" data-mark="${seg.mark}" data-off="${seg.start}" title="${escapeHtml(
              lp.citation_marks[seg.mark]!.bib_key,
            )}">${text}</span>`
          : `<span class="plain" data-off="${seg.start}">${text}</span>`;
      if (seg.span >= 0) {
        const span = lp.spans[seg.span]!;
        const classes = [
          "span",
          span.type === DOMINANT ? "dominant" : "reference",
          bad.has(seg.span) ? "invalid" : "",
          selection?.span === seg.span ? "selected" : "",
        ]
          .filter(Boolean)
          .join(" ");
        inner = `<span class="${classes}" data-span="${seg.span}">${inner}</span>`;
      }
      return inner;
    });
    return (
      `<div class="sentence${picked}" data-sentence="${i}">` +
      `<button class="label-badge" data-sentence="${i}" style="background:${color}">` +
      `${escapeHtml(label)}</button>` +
      `<span class="sentence-text">${parts.join("")}</span></div>`
    );
  });
  const notice = lp.pretag_unavailable
    ? `<div class="banner warn">no model pretag is loaded; labels below are placeholders</div>`
    : "";
  return `<div class="paragraph">${notice}${rows.join("")}</div>`;
}

export function renderViolations(violations: Violation[]): string {
  if (violations.length === 0) return "";
  const items = violations.map((v) => {
    const anchor =
      v.span_index !== null && v.span_index !== undefined ? ` (span ${v.span_index})` : "";
    return `<li data-rule="${escapeHtml(v.rule)}"><code>${escapeHtml(v.rule)}</code>: ${escapeHtml(
      v.message,
    )}${anchor}</li>`;
  });
  return `<div class="banner error"><strong>blocked:</strong><ul>${items.join("")}</ul></div>`;
}

export function renderBanner(kind: "info" | "warn" | "error", message: string): string {
  return `<div class="banner ${kind}">${escapeHtml(message)}</div>`;
}

/** Sentence-label and span differences between the local buffer and the
 * version the server now holds, shown when a submit hits a version conflict.
 */
export function describeDiff(mine: LabeledParagraphJson, theirs: LabeledParagraphJson): string[] {
  const lines: string[] = [];
  const n = Math.max(mine.sentence_labels.length, theirs.sentence_labels.length);
  for (let i = 0; i < n; i++) {
    const a = mine.sentence_labels[i];
    const b = theirs.sentence_labels[i];
    if (a !== b) lines.push(`sentence ${i}: yours '${a ?? "-"}' vs server '${b ?? "-"}'`);
  }
  const key = (s: { start: number; end: number; type: string }): string =>
    `(${s.start},${s.end}) ${s.type}`;
  const mineSpans = new Set(mine.spans.map(key));
  const theirSpans = new Set(theirs.spans.map(key));
  for (const s of mine.spans) {
    if (!theirSpans.has(key(s))) lines.push(`span ${key(s)}: only in yours`);
  }
  for (const s of theirs.spans) {
    if (!mineSpans.has(key(s))) lines.push(`span ${key(s)}: only on server`);
  }
  if (lines.length === 0) lines.push("no label or span differences (citation detail differs)");
  return lines;
}

export function renderConflict(
  currentVersion: number,
  baseVersion: number,
  diff: string[],
): string {
  const items = diff.map((line) => `<li>${escapeHtml(line)}</li>`).join("");
  return (
    `<div class="banner error conflict">` +
    `<strong>version conflict:</strong> you edited version ${baseVersion}, ` +
    `the server is at version ${currentVersion}.<ul>${items}</ul>` +
    `<button data-action="reload">discard mine and reload</button></div>`
  );
}
