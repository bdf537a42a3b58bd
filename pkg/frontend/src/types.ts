/** Wire types for the correction service's JSON payloads.
 *
 * Field names and shapes mirror the server's labeled-paragraph dicts exactly;
 * all offsets are 0-based, half-open, in unicode code points.
 */

export const DISCOURSE_LABELS = [
  "single_summ",
  "multi_summ",
  "narrative_cite",
  "reflection",
  "transition",
  "other",
] as const;

export type DiscourseLabel = (typeof DISCOURSE_LABELS)[number];

export const DOMINANT = "dominant";
export const REFERENCE = "reference";
export type SpanType = typeof DOMINANT | typeof REFERENCE;

export type Offsets = [number, number];

export interface CitationMarkJson {
  bib_key: string;
  cited_paper_id: string | null;
  end: number;
  start: number;
}

export interface CitationJson extends CitationMarkJson {
  type: string;
}

export interface SpanJson {
  citations: CitationJson[];
  continuation: boolean;
  end: number;
  start: number;
  type: string;
}

export interface LabeledParagraphJson {
  citation_marks: CitationMarkJson[];
  index: number | null;
  paper_id: string | null;
  sentence_labels: string[];
  sentences: Offsets[];
  spans: SpanJson[];
  text: string;
  tokens: Offsets[];
  pretag_unavailable?: boolean;
}

export interface ItemPayload {
  paragraph_id: string;
  version: number;
  labeled: LabeledParagraphJson;
}

export interface Violation {
  rule: string;
  message: string;
  span_index: number | null;
}

/** Paragraph text is indexed by code point, JS strings by UTF-16 unit; these
 * helpers keep the two from drifting apart on astral characters.
 */
export function codePoints(text: string): string[] {
  return Array.from(text);
}

export function cpLength(text: string): number {
  return codePoints(text).length;
}

export function cpSlice(text: string, start: number, end: number): string {
  return codePoints(text).slice(start, end).join("");
}
