/** Editing state for one paragraph: a pristine copy plus a working buffer.
 *
 * Every edit goes through applyEdit, which mutates a clone, re-sorts spans,
 * and validates.  An edit that breaks any schema invariant is blocked and the
 * buffer is left untouched, so the buffer is valid at all times and an
 * untouched buffer serializes byte-identically to what the server sent.
 */

import { canonicalJson } from "./canonical.js";
import {
  CitationJson,
  CitationMarkJson,
  DOMINANT,
  DiscourseLabel,
  LabeledParagraphJson,
  REFERENCE,
  SpanJson,
  SpanType,
  Violation,
} from "./types.js";
import { validateLabeled } from "./validate.js";

export interface ViewState {
  paragraphId: string;
  baseVersion: number;
  original: LabeledParagraphJson;
  buffer: LabeledParagraphJson;
}

export type Edit =
  | { kind: "relabel_sentence"; sentence: number; label: DiscourseLabel }
  | { kind: "move_span_edge"; span: number; edge: "start" | "end"; pos: number }
  | { kind: "toggle_span_type"; span: number }
  | { kind: "toggle_citation_type"; span: number; citation: number }
  | { kind: "add_span"; start: number; end: number; spanType: SpanType }
  | { kind: "delete_span"; span: number };

export type EditResult =
  | { ok: true; state: ViewState }
  | { ok: false; reason: string; violations: Violation[] };

export function makeState(
  paragraphId: string,
  version: number,
  labeled: LabeledParagraphJson,
): ViewState {
  return {
    paragraphId,
    baseVersion: version,
    original: labeled,
    buffer: structuredClone(labeled),
  };
}

export function isDirty(state: ViewState): boolean {
  return canonicalJson(state.buffer) !== canonicalJson(state.original);
}

/** Snap a proposed span start left onto a token boundary.
 *
 * Inside a token the span widens to include it; in a gap it advances to the
 * next token start.  -1 means no token can start at or after pos.
 */
export function snapStart(lp: LabeledParagraphJson, pos: number): number {
  let next = -1;
  for (const [ts, te] of lp.tokens) {
    if (ts === pos) return pos;
    if (ts < pos && pos < te) return ts;
    if (ts > pos && (next === -1 || ts < next)) next = ts;
  }
  return next;
}

/** Snap a proposed span end right onto a token boundary (mirror of snapStart). */
export function snapEnd(lp: LabeledParagraphJson, pos: number): number {
  let prev = -1;
  for (const [ts, te] of lp.tokens) {
    if (te === pos) return pos;
    if (ts < pos && pos < te) return te;
    if (te < pos && te > prev) prev = te;
  }
  return prev;
}

function marksInside(lp: LabeledParagraphJson, start: number, end: number): CitationMarkJson[] {
  return lp.citation_marks.filter((m) => m.start >= start && m.end <= end);
}

function sortCitations(citations: CitationJson[]): CitationJson[] {
  return citations.sort(
    (a, b) =>
      a.start - b.start ||
      a.end - b.end ||
      (a.bib_key < b.bib_key ? -1 : a.bib_key > b.bib_key ? 1 : 0),
  );
}

/** Rebuild a span's citation list from the marks its range now contains.
 *
 * Marks already cited keep their type; newly absorbed marks take the span's
 * type, so an unedited citation never changes under a boundary move.
 */
function recomputeCitations(lp: LabeledParagraphJson, span: SpanJson): void {
  const keep = new Map(span.citations.map((c) => [`${c.start}:${c.end}:${c.bib_key}`, c]));
  span.citations = sortCitations(
    marksInside(lp, span.start, span.end).map(
      (m) => keep.get(`${m.start}:${m.end}:${m.bib_key}`) ?? { ...m, type: span.type },
    ),
  );
}

function blocked(rule: string, message: string, spanIndex: number | null): EditResult {
  return { ok: false, reason: message, violations: [{ rule, message, span_index: spanIndex }] };
}

function mutate(lp: LabeledParagraphJson, edit: Edit): EditResult | null {
  switch (edit.kind) {
    case "relabel_sentence": {
      if (edit.sentence < 0 || edit.sentence >= lp.sentence_labels.length) {
        throw new RangeError(`no sentence ${edit.sentence}`);
      }
      lp.sentence_labels[edit.sentence] = edit.label;
      return null;
    }
    case "move_span_edge": {
      const span = lp.spans[edit.span];
      if (!span) throw new RangeError(`no span ${edit.span}`);
      const snapped = edit.edge === "start" ? snapStart(lp, edit.pos) : snapEnd(lp, edit.pos);
      if (snapped === -1) {
        return blocked("span_alignment", "no token boundary in that direction", edit.span);
      }
      if (edit.edge === "start") span.start = snapped;
      else span.end = snapped;
      if (span.start >= span.end) {
        return blocked("span_bounds", "span edges would cross", edit.span);
      }
      recomputeCitations(lp, span);
      return null;
    }
    case "toggle_span_type": {
      const span = lp.spans[edit.span];
      if (!span) throw new RangeError(`no span ${edit.span}`);
      span.type = span.type === DOMINANT ? REFERENCE : DOMINANT;
      for (const c of span.citations) c.type = span.type;
      return null;
    }
    case "toggle_citation_type": {
      const span = lp.spans[edit.span];
      if (!span) throw new RangeError(`no span ${edit.span}`);
      const citation = span.citations[edit.citation];
      if (!citation) throw new RangeError(`no citation ${edit.citation} in span ${edit.span}`);
      citation.type = citation.type === DOMINANT ? REFERENCE : DOMINANT;
      // the span's type is derived: dominant iff any contained citation is
      span.type = span.citations.some((c) => c.type === DOMINANT) ? DOMINANT : REFERENCE;
      return null;
    }
    case "add_span": {
      const start = snapStart(lp, edit.start);
      const end = snapEnd(lp, edit.end);
      if (start === -1 || end === -1 || start >= end) {
        return blocked("span_bounds", "selection covers no tokens", null);
      }
      const marks = marksInside(lp, start, end);
      const span: SpanJson = {
        citations: sortCitations(marks.map((m) => ({ ...m, type: edit.spanType }))),
        continuation: marks.length === 0,
        end,
        start,
        type: edit.spanType,
      };
      lp.spans.push(span);
      return null;
    }
    case "delete_span": {
      if (edit.span < 0 || edit.span >= lp.spans.length) {
        throw new RangeError(`no span ${edit.span}`);
      }
      lp.spans.splice(edit.span, 1);
      return null;
    }
  }
}

export function applyEdit(state: ViewState, edit: Edit): EditResult {
  const draft = structuredClone(state.buffer);
  const early = mutate(draft, edit);
  if (early) return early;
  draft.spans.sort((a, b) => a.start - b.start);
  const violations = validateLabeled(draft);
  if (violations.length > 0) {
    return { ok: false, reason: violations[0]!.message, violations };
  }
  return { ok: true, state: { ...state, buffer: draft } };
}
