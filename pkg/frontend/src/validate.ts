/** Client-side mirror of the server's schema validation.
 *
 * Rule names and trigger conditions match the service one for one, so an
 * edit blocked here is exactly an edit the server would reject, and the UI
 * can explain the block with the same vocabulary the server uses.
 */

import {
  CitationMarkJson,
  DISCOURSE_LABELS,
  DOMINANT,
  LabeledParagraphJson,
  REFERENCE,
  SpanJson,
  Violation,
  cpLength,
} from "./types.js";

const CITATION_TYPES: readonly string[] = [DOMINANT, REFERENCE];

function isOffsetPair(value: unknown): boolean {
  return (
    Array.isArray(value) &&
    value.length === 2 &&
    Number.isInteger(value[0]) &&
    Number.isInteger(value[1])
  );
}

/** Why a fetched payload cannot be rendered at all, or null when it has the
 * required shape.  Shape problems get an error banner; schema problems go
 * through validateLabeled and render inline.
 */
export function malformedReason(value: unknown): string | null {
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    return "payload is not an object";
  }
  const record = value as Record<string, unknown>;
  if (typeof record["text"] !== "string") return "missing or non-string 'text'";
  for (const field of ["sentences", "tokens"]) {
    const items = record[field];
    if (!Array.isArray(items) || !items.every(isOffsetPair)) {
      return `'${field}' must be a list of [start, end] pairs`;
    }
  }
  for (const field of ["citation_marks", "sentence_labels", "spans"]) {
    if (!Array.isArray(record[field])) return `'${field}' must be a list`;
  }
  if (!(record["sentence_labels"] as unknown[]).every((x) => typeof x === "string")) {
    return "'sentence_labels' must be a list of strings";
  }
  for (const m of record["citation_marks"] as unknown[]) {
    const mark = m as Record<string, unknown>;
    if (
      typeof m !== "object" ||
      m === null ||
      typeof mark["bib_key"] !== "string" ||
      !Number.isInteger(mark["start"]) ||
      !Number.isInteger(mark["end"])
    ) {
      return "each citation mark needs bib_key, start, end";
    }
  }
  for (const s of record["spans"] as unknown[]) {
    const span = s as Record<string, unknown>;
    if (
      typeof s !== "object" ||
      s === null ||
      !Number.isInteger(span["start"]) ||
      !Number.isInteger(span["end"]) ||
      typeof span["type"] !== "string" ||
      typeof span["continuation"] !== "boolean" ||
      !Array.isArray(span["citations"])
    ) {
      return "each span needs start, end, type, continuation, citations";
    }
  }
  return null;
}

function spanTokens(lp: LabeledParagraphJson, span: SpanJson): number[] {
  const out: number[] = [];
  for (let i = 0; i < lp.tokens.length; i++) {
    const [ts, te] = lp.tokens[i]!;
    if (ts >= span.start && te <= span.end) out.push(i);
  }
  return out;
}

function marksInside(
  lp: LabeledParagraphJson,
  start: number,
  end: number,
): CitationMarkJson[] {
  return lp.citation_marks.filter((m) => m.start >= start && m.end <= end);
}

function sentenceOfToken(lp: LabeledParagraphJson, tokIdx: number): number {
  const [ts, te] = lp.tokens[tokIdx]!;
  for (let i = 0; i < lp.sentences.length; i++) {
    const [s, e] = lp.sentences[i]!;
    if (s <= ts && te <= e) return i;
  }
  return -1;
}

function citationTriples(
  items: { start: number; end: number; bib_key: string }[],
): string {
  const sorted = items
    .map((c) => [c.start, c.end, c.bib_key] as const)
    .sort((a, b) => a[0] - b[0] || a[1] - b[1] || (a[2] < b[2] ? -1 : a[2] > b[2] ? 1 : 0));
  return JSON.stringify(sorted);
}

export function validateLabeled(lp: LabeledParagraphJson): Violation[] {
  const v: Violation[] = [];
  const n = cpLength(lp.text);

  if (lp.sentence_labels.length !== lp.sentences.length) {
    v.push({
      rule: "label_count",
      message: `${lp.sentence_labels.length} labels for ${lp.sentences.length} sentences`,
      span_index: null,
    });
  }
  lp.sentence_labels.forEach((lab, i) => {
    if (!(DISCOURSE_LABELS as readonly string[]).includes(lab)) {
      v.push({
        rule: "label_value",
        message: `sentence ${i}: unknown label '${lab}'`,
        span_index: null,
      });
    }
  });

  let pos = 0;
  for (const [s, e] of lp.sentences) {
    if (s !== pos || e <= s) {
      v.push({
        rule: "sentence_tiling",
        message: `sentence (${s},${e}) breaks tiling at ${pos}`,
        span_index: null,
      });
      break;
    }
    pos = e;
  }
  if (lp.sentences.length > 0 && pos !== n) {
    v.push({
      rule: "sentence_tiling",
      message: `sentences end at ${pos}, text has ${n} chars`,
      span_index: null,
    });
  }

  const tokenStarts = new Set(lp.tokens.map((t) => t[0]));
  const tokenEnds = new Set(lp.tokens.map((t) => t[1]));
  for (const m of lp.citation_marks) {
    if (!tokenStarts.has(m.start) || !tokenEnds.has(m.end)) {
      v.push({
        rule: "mark_alignment",
        message: `mark (${m.start},${m.end}) not on token boundaries`,
        span_index: null,
      });
    }
  }

  let prevEnd = -1;
  const spanTokenSets: number[][] = [];
  lp.spans.forEach((span, si) => {
    if (!(0 <= span.start && span.start < span.end && span.end <= n)) {
      v.push({
        rule: "span_bounds",
        message: `span (${span.start},${span.end}) outside text`,
        span_index: si,
      });
      spanTokenSets.push([]);
      return;
    }
    if (!CITATION_TYPES.includes(span.type)) {
      v.push({
        rule: "span_type",
        message: `unknown span type '${span.type}'`,
        span_index: si,
      });
    }
    if (span.start < prevEnd) {
      v.push({
        rule: "span_overlap",
        message: `span ${si} overlaps the previous span`,
        span_index: si,
      });
    }
    prevEnd = Math.max(prevEnd, span.end);

    if (!tokenStarts.has(span.start) || !tokenEnds.has(span.end)) {
      v.push({
        rule: "span_alignment",
        message: `span (${span.start},${span.end}) not token-aligned`,
        span_index: si,
      });
    }
    const toks = spanTokens(lp, span);
    spanTokenSets.push(toks);

    const contained = marksInside(lp, span.start, span.end);
    if (citationTriples(span.citations) !== citationTriples(contained)) {
      v.push({
        rule: "span_citations",
        message: `span ${si} citation list differs from the marks it contains`,
        span_index: si,
      });
    }
    for (const c of span.citations) {
      if (!CITATION_TYPES.includes(c.type)) {
        v.push({
          rule: "citation_type",
          message: `unknown citation type '${c.type}'`,
          span_index: si,
        });
      }
    }

    if (span.citations.length > 0) {
      const isDom = span.citations.some((c) => c.type === DOMINANT);
      if ((span.type === DOMINANT) !== isDom) {
        v.push({
          rule: "dominant_rule",
          message: "span type must be dominant iff any contained citation is dominant",
          span_index: si,
        });
      }
    } else if (!span.continuation) {
      v.push({
        rule: "empty_span",
        message: `span ${si} has no citations and no continuation flag`,
        span_index: si,
      });
    } else {
      const earlier = lp.spans
        .slice(0, si)
        .some((s2) => s2.end <= span.start && s2.type === span.type);
      if (!earlier) {
        v.push({
          rule: "continuation",
          message: `continuation span ${si} follows no earlier ${span.type} span`,
          span_index: si,
        });
      }
    }

    if (span.type === REFERENCE && toks.length > 0) {
      const sents = new Set(toks.map((t) => sentenceOfToken(lp, t)));
      if (sents.size > 1) {
        v.push({
          rule: "reference_span_length",
          message: "reference span exceeds one sentence",
          span_index: si,
        });
      }
    }

    // embedded reference marks must be strictly interior, or the token-level
    // flattening the server uses for training cannot be decoded back
    if (span.type === DOMINANT && toks.length > 0) {
      const [firstTs] = lp.tokens[toks[0]!]!;
      const lastTe = lp.tokens[toks[toks.length - 1]!]![1];
      for (const c of span.citations) {
        if (c.type !== REFERENCE) continue;
        if ((c.start <= firstTs && firstTs < c.end) || (c.start < lastTe && lastTe <= c.end)) {
          v.push({
            rule: "edge_reference",
            message: `embedded reference mark (${c.start},${c.end}) touches span edge`,
            span_index: si,
          });
        }
      }
    }
  });

  // dominant, reference(s), dominant with no O token between them would
  // decode as one merged dominant span, so the shape is disallowed
  const ordered = lp.spans
    .map((_, i) => i)
    .sort((a, b) => lp.spans[a]!.start - lp.spans[b]!.start);
  for (let k = 0; k < ordered.length; k++) {
    const a = ordered[k]!;
    if (lp.spans[a]!.type !== DOMINANT || spanTokenSets[a]!.length === 0) continue;
    let lastTok = spanTokenSets[a]![spanTokenSets[a]!.length - 1]!;
    const refs: number[] = [];
    let j = k + 1;
    while (j < ordered.length) {
      const b = ordered[j]!;
      const toksB = spanTokenSets[b]!;
      if (toksB.length === 0 || toksB[0] !== lastTok + 1) break;
      if (lp.spans[b]!.type === REFERENCE) {
        refs.push(b);
        lastTok = toksB[toksB.length - 1]!;
        j += 1;
        continue;
      }
      if (refs.length > 0) {
        v.push({
          rule: "ambiguous_adjacency",
          message: "reference span(s) token-adjacent to dominant spans on both sides",
          span_index: refs[0]!,
        });
      }
      break;
    }
  }
  return v;
}
