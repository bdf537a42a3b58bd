"""Standoff interchange: paragraph text file plus a tab-separated annotation file.

Line grammar (documented bit-exactly in docs/standoff.md):
  T<n>\t<TYPE> <start> <end>\t<surface>   text-bound annotation
  A<n>\t<NAME> T<m>[ <VALUE>]             attribute (binary or valued)
  #<n>\tAnnotatorNotes T<m>\t<json>       note carrying bibliography linkage

Sentences are text-bound annotations typed by their discourse label; spans
and citation marks are CitationSpan / CitationMark entities. Citation types
ride on SpanType / MarkType attributes, the follow-up flag on a binary
Continuation attribute. Token offsets are not serialized: import re-runs the
deterministic tokenizer inside the imported sentence boundaries.
"""

import json
from pathlib import Path

from rwkit.schema import (
    CITATION_TYPES,
    DISCOURSE_LABELS,
    Citation,
    CitationMark,
    CitationSpan,
    LabeledParagraph,
    Paragraph,
    SchemaError,
    validate,
)
from rwkit.segment import tokenize


class StandoffError(ValueError):
    """Raised on malformed standoff files; carries the offending line number."""


def _type_name(span_type: str) -> str:
    return span_type.capitalize()


def export_standoff(lp: LabeledParagraph) -> tuple[str, str]:
    """Serialize a valid labeled paragraph to (text file body, ann file body)."""
    report = validate(lp)
    if report:
        raise SchemaError(
            "refusing to export an invalid paragraph: " + "; ".join(map(str, report))
        )
    text = lp.paragraph.text
    if "\t" in text or "\n" in text:
        raise StandoffError("paragraph text contains a tab or newline; not representable")

    lines: list[str] = []
    t_id = a_id = n_id = 0

    def entity(kind: str, start: int, end: int) -> str:
        nonlocal t_id
        t_id += 1
        lines.append(f"T{t_id}\t{kind} {start} {end}\t{text[start:end]}")
        return f"T{t_id}"

    def attribute(name: str, ref: str, value: str | None = None) -> None:
        nonlocal a_id
        a_id += 1
        tail = f" {value}" if value is not None else ""
        lines.append(f"A{a_id}\t{name} {ref}{tail}")

    def note(ref: str, payload: dict) -> None:
        nonlocal n_id
        n_id += 1
        lines.append(
            f"#{n_id}\tAnnotatorNotes {ref}\t"
            + json.dumps(payload, sort_keys=True, ensure_ascii=False)
        )

    for (s, e), label in zip(lp.paragraph.sentences, lp.sentence_labels):
        entity(label, s, e)
    mark_refs: dict[tuple[int, int], str] = {}
    for span in sorted(lp.spans, key=lambda sp: sp.start):
        ref = entity("CitationSpan", span.start, span.end)
        attribute("SpanType", ref, _type_name(span.span_type))
        if span.continuation:
            attribute("Continuation", ref)
    for m in lp.paragraph.citation_marks:
        ref = entity("CitationMark", m.start, m.end)
        mark_refs[(m.start, m.end)] = ref
        note(ref, {"bib_key": m.bib_key, "cited_paper_id": m.cited_paper_id})
    for span in lp.spans:
        for c in span.citations:
            attribute("MarkType", mark_refs[(c.start, c.end)], _type_name(c.span_type))

    return text, "\n".join(lines) + ("\n" if lines else "")


def import_standoff(
    text: str, ann: str, paper_id: str | None = None, index: int | None = None
) -> LabeledParagraph:
    """Rebuild a labeled paragraph from standoff file bodies.

    The format carries text and annotations only; paragraph identity lives
    in file names and is passed back in here. Malformed lines and
    out-of-range offsets raise StandoffError with the 1-based line number.
    """
    entities: dict[str, tuple[str, int, int]] = {}
    attrs: dict[str, list[tuple[str, str | None]]] = {}
    notes: dict[str, dict] = {}

    for lineno, raw in enumerate(ann.splitlines(), start=1):
        if not raw.strip():
            continue
        parts = raw.split("\t")
        ident = parts[0]
        try:
            if ident.startswith("T"):
                kind, start_s, end_s = parts[1].split(" ")
                start, end = int(start_s), int(end_s)
                if not (0 <= start <= end <= len(text)):
                    raise StandoffError(f"line {lineno}: offsets ({start},{end}) outside text")
                if len(parts) > 2 and parts[2] != text[start:end]:
                    raise StandoffError(f"line {lineno}: surface text does not match offsets")
                entities[ident] = (kind, start, end)
            elif ident.startswith("A"):
                fields = parts[1].split(" ")
                name, ref = fields[0], fields[1]
                value = fields[2] if len(fields) > 2 else None
                attrs.setdefault(ref, []).append((name, value))
            elif ident.startswith("#"):
                ref = parts[1].split(" ")[1]
                notes[ref] = json.loads(parts[2])
            else:
                raise StandoffError(f"line {lineno}: unknown annotation id {ident!r}")
        except StandoffError:
            raise
        except (ValueError, IndexError) as exc:
            raise StandoffError(f"line {lineno}: cannot parse {raw!r}") from exc

    sentences: list[tuple[int, int, str]] = []
    spans: list[tuple[str, int, int]] = []
    marks: list[tuple[str, int, int]] = []
    for ref, (kind, start, end) in entities.items():
        if kind in DISCOURSE_LABELS:
            sentences.append((start, end, kind))
        elif kind == "CitationSpan":
            spans.append((ref, start, end))
        elif kind == "CitationMark":
            marks.append((ref, start, end))
        else:
            raise StandoffError(f"unknown entity type {kind!r}")

    sentences.sort()
    sent_bounds = [(s, e) for s, e, _ in sentences]
    labels = [lab for _, _, lab in sentences]
    tokens = tokenize(text, sent_bounds)

    def attr_value(ref: str, name: str) -> str | None:
        for n, v in attrs.get(ref, []):
            if n == name:
                return v
        return None

    citation_marks = []
    mark_type: dict[tuple[int, int], str] = {}
    for ref, start, end in sorted(marks, key=lambda m: m[1]):
        meta = notes.get(ref, {})
        citation_marks.append(
            CitationMark(start, end, meta.get("bib_key", ""), meta.get("cited_paper_id"))
        )
        mt = attr_value(ref, "MarkType")
        if mt is not None:
            if mt.lower() not in CITATION_TYPES:
                raise StandoffError(f"unknown MarkType {mt!r}")
            mark_type[(start, end)] = mt.lower()

    paragraph = Paragraph(
        text=text,
        sentences=sent_bounds,
        tokens=tokens,
        citation_marks=citation_marks,
        paper_id=paper_id,
        index=index,
    )

    citation_spans = []
    for ref, start, end in sorted(spans, key=lambda s: s[1]):
        st = attr_value(ref, "SpanType")
        if st is None or st.lower() not in CITATION_TYPES:
            raise StandoffError(f"span {ref} lacks a valid SpanType attribute")
        citations = [
            Citation(
                m.start,
                m.end,
                m.bib_key,
                mark_type.get((m.start, m.end), st.lower()),
                m.cited_paper_id,
            )
            for m in citation_marks
            if m.start >= start and m.end <= end
        ]
        citation_spans.append(
            CitationSpan(
                start=start,
                end=end,
                span_type=st.lower(),
                citations=citations,
                continuation=any(n == "Continuation" for n, _ in attrs.get(ref, [])),
            )
        )

    return LabeledParagraph(
        paragraph=paragraph, sentence_labels=labels, spans=citation_spans
    )


def write_standoff(lp: LabeledParagraph, directory: str | Path, name: str) -> tuple[Path, Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    text, ann = export_standoff(lp)
    txt_path = directory / f"{name}.txt"
    ann_path = directory / f"{name}.ann"
    txt_path.write_text(text, encoding="utf-8")
    ann_path.write_text(ann, encoding="utf-8")
    return txt_path, ann_path


def read_standoff(
    txt_path: str | Path,
    ann_path: str | Path,
    paper_id: str | None = None,
    index: int | None = None,
) -> LabeledParagraph:
    text = Path(txt_path).read_text(encoding="utf-8")
    ann = Path(ann_path).read_text(encoding="utf-8")
    return import_standoff(text, ann, paper_id=paper_id, index=index)
