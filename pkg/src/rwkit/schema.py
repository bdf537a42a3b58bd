"""Annotation schema for related-work paragraphs.

A paragraph's annotation consists of one discourse label per sentence plus a
set of non-overlapping, token-aligned citation spans. Each span owns the
citation marks that fall inside it; a span is dominant iff any of its
citations is dominant. Reference citations may be embedded inside a dominant
span, which the token-level tag scheme flattens into alternating segments and
the decoder merges back.
"""

from dataclasses import dataclass, field, replace

from rwkit.segment import split_sentences, snap_to_tokens, tokenize

DISCOURSE_LABELS = (
    "single_summ",
    "multi_summ",
    "narrative_cite",
    "reflection",
    "transition",
    "other",
)

DOMINANT = "dominant"
REFERENCE = "reference"
CITATION_TYPES = (DOMINANT, REFERENCE)

# Token tag inventories: span detection is type-blind, type recognition is not.
CS_TAGS = ("B", "I", "O")
CT_TAGS = ("B-Dominant", "I-Dominant", "B-Reference", "I-Reference", "O")


class SchemaError(ValueError):
    """Raised when an operation is handed structurally unusable input."""


@dataclass
class CitationMark:
    start: int
    end: int
    bib_key: str
    cited_paper_id: str | None = None


@dataclass
class Paragraph:
    """Paragraph text with sentence/token offsets and linked citation marks.

    Offsets are 0-based, half-open, over unicode code points and
    paragraph-local. Sentences tile the text; tokens never straddle a
    sentence boundary; marks are snapped outward to token boundaries.
    """

    text: str
    sentences: list[tuple[int, int]] = field(default_factory=list)
    tokens: list[tuple[int, int]] = field(default_factory=list)
    citation_marks: list[CitationMark] = field(default_factory=list)
    paper_id: str | None = None
    index: int | None = None

    def token_texts(self) -> list[str]:
        return [self.text[s:e] for s, e in self.tokens]

    def sentence_of_token(self, tok_idx: int) -> int:
        ts, te = self.tokens[tok_idx]
        for i, (s, e) in enumerate(self.sentences):
            if s <= ts and te <= e:
                return i
        raise SchemaError(f"token {tok_idx} at ({ts},{te}) lies in no sentence")

    def sentence_token_bounds(self) -> list[tuple[int, int]]:
        """Per sentence, the half-open range of token indices it contains."""
        bounds = []
        t = 0
        for s, e in self.sentences:
            lo = t
            while t < len(self.tokens) and self.tokens[t][1] <= e and self.tokens[t][0] >= s:
                t += 1
            bounds.append((lo, t))
        return bounds


@dataclass
class Citation:
    """A citation mark as it participates in a span, with its own type."""

    start: int
    end: int
    bib_key: str
    span_type: str  # dominant | reference
    cited_paper_id: str | None = None


@dataclass
class CitationSpan:
    start: int
    end: int
    span_type: str  # dominant | reference
    citations: list[Citation] = field(default_factory=list)
    continuation: bool = False


@dataclass
class LabeledParagraph:
    paragraph: Paragraph
    sentence_labels: list[str] = field(default_factory=list)
    spans: list[CitationSpan] = field(default_factory=list)
    pretag_unavailable: bool = False


@dataclass
class TagSequence:
    cs_tags: list[str]
    ct_tags: list[str]


@dataclass
class Violation:
    rule: str
    message: str
    span_index: int | None = None

    def __str__(self) -> str:
        return f"{self.rule}: {self.message}"


def _span_tokens(lp_paragraph: Paragraph, span: CitationSpan) -> list[int]:
    return [
        i
        for i, (ts, te) in enumerate(lp_paragraph.tokens)
        if ts >= span.start and te <= span.end
    ]


def _marks_inside(paragraph: Paragraph, start: int, end: int) -> list[CitationMark]:
    return [m for m in paragraph.citation_marks if m.start >= start and m.end <= end]


def validate(lp: LabeledParagraph) -> list[Violation]:
    """Check every schema invariant; an empty report means the annotation is valid.

    Violations are data, not exceptions: model output and half-finished human
    corrections both get validated, and the caller decides what to do.
    """
    v: list[Violation] = []
    p = lp.paragraph
    n = len(p.text)

    if len(lp.sentence_labels) != len(p.sentences):
        v.append(
            Violation(
                "label_count",
                f"{len(lp.sentence_labels)} labels for {len(p.sentences)} sentences",
            )
        )
    for i, lab in enumerate(lp.sentence_labels):
        if lab not in DISCOURSE_LABELS:
            v.append(Violation("label_value", f"sentence {i}: unknown label {lab!r}"))

    # Paragraph well-formedness: sentences tile, tokens nest, marks align.
    pos = 0
    for s, e in p.sentences:
        if s != pos or e <= s:
            v.append(Violation("sentence_tiling", f"sentence ({s},{e}) breaks tiling at {pos}"))
            break
        pos = e
    if p.sentences and pos != n:
        v.append(Violation("sentence_tiling", f"sentences end at {pos}, text has {n} chars"))
    token_starts = {t[0] for t in p.tokens}
    token_ends = {t[1] for t in p.tokens}
    for m in p.citation_marks:
        if m.start not in token_starts or m.end not in token_ends:
            v.append(
                Violation("mark_alignment", f"mark ({m.start},{m.end}) not on token boundaries")
            )

    prev_end = -1
    span_token_sets = []
    for si, span in enumerate(lp.spans):
        if not (0 <= span.start < span.end <= n):
            v.append(Violation("span_bounds", f"span ({span.start},{span.end}) outside text", si))
            span_token_sets.append([])
            continue
        if span.span_type not in CITATION_TYPES:
            v.append(Violation("span_type", f"unknown span type {span.span_type!r}", si))
        if span.start < prev_end:
            v.append(Violation("span_overlap", f"span {si} overlaps the previous span", si))
        prev_end = max(prev_end, span.end)

        if span.start not in token_starts or span.end not in token_ends:
            v.append(
                Violation(
                    "span_alignment", f"span ({span.start},{span.end}) not token-aligned", si
                )
            )
        toks = _span_tokens(p, span)
        span_token_sets.append(toks)

        contained = _marks_inside(p, span.start, span.end)
        cited = [(c.start, c.end, c.bib_key) for c in span.citations]
        present = [(m.start, m.end, m.bib_key) for m in contained]
        if sorted(cited) != sorted(present):
            v.append(
                Violation(
                    "span_citations",
                    f"span {si} citations {cited} != contained marks {present}",
                    si,
                )
            )
        for c in span.citations:
            if c.span_type not in CITATION_TYPES:
                v.append(Violation("citation_type", f"unknown citation type {c.span_type!r}", si))

        if span.citations:
            is_dom = any(c.span_type == DOMINANT for c in span.citations)
            if (span.span_type == DOMINANT) != is_dom:
                v.append(
                    Violation(
                        "dominant_rule",
                        "span type must be dominant iff any contained citation is dominant",
                        si,
                    )
                )
        elif not span.continuation:
            v.append(
                Violation("empty_span", f"span {si} has no citations and no continuation flag", si)
            )
        else:
            earlier = [
                s2
                for s2 in lp.spans[:si]
                if s2.end <= span.start and s2.span_type == span.span_type
            ]
            if not earlier:
                v.append(
                    Violation(
                        "continuation",
                        f"continuation span {si} follows no earlier {span.span_type} span",
                        si,
                    )
                )

        if span.span_type == REFERENCE and toks:
            sents = {p.sentence_of_token(t) for t in toks}
            if len(sents) > 1:
                v.append(
                    Violation("reference_span_length", "reference span exceeds one sentence", si)
                )

        # Embedded reference marks must be strictly interior, or the
        # token-level flattening cannot be decoded back.
        if span.span_type == DOMINANT and toks:
            ref_ranges = [
                (c.start, c.end) for c in span.citations if c.span_type == REFERENCE
            ]
            first_ts, first_te = p.tokens[toks[0]]
            last_ts, last_te = p.tokens[toks[-1]]
            for rs, re_ in ref_ranges:
                if rs <= first_ts < re_ or rs < last_te <= re_:
                    v.append(
                        Violation(
                            "edge_reference",
                            f"embedded reference mark ({rs},{re_}) touches span edge",
                            si,
                        )
                    )

    # Dominant, reference(s), dominant with no O token anywhere in between
    # decodes as one merged dominant span, so the configuration is disallowed.
    ordered = sorted(range(len(lp.spans)), key=lambda i: lp.spans[i].start)
    for k, a in enumerate(ordered):
        if lp.spans[a].span_type != DOMINANT or not span_token_sets[a]:
            continue
        last_tok = span_token_sets[a][-1]
        refs = []
        j = k + 1
        while j < len(ordered):
            b = ordered[j]
            if not span_token_sets[b] or span_token_sets[b][0] != last_tok + 1:
                break
            if lp.spans[b].span_type == REFERENCE:
                refs.append(b)
                last_tok = span_token_sets[b][-1]
                j += 1
                continue
            if refs:
                v.append(
                    Violation(
                        "ambiguous_adjacency",
                        "reference span(s) token-adjacent to dominant spans on both sides",
                        refs[0],
                    )
                )
            break
    return v


def to_bio(lp: LabeledParagraph) -> TagSequence:
    """Flatten spans to per-token BIO2 tags, one tag per token per task.

    Tokens of a reference mark embedded in a dominant span are tagged
    Reference, splitting the dominant tokens into segments; the span
    detection tags see the whole span as one segment.
    """
    report = validate(lp)
    if report:
        raise SchemaError(
            "refusing to tag an invalid paragraph: " + "; ".join(str(r) for r in report)
        )
    p = lp.paragraph
    n = len(p.tokens)
    cs = ["O"] * n
    ct = ["O"] * n
    for span in sorted(lp.spans, key=lambda s: s.start):
        toks = _span_tokens(p, span)
        if not toks:
            continue
        for j, t in enumerate(toks):
            cs[t] = "B" if j == 0 else "I"
        if span.span_type == REFERENCE:
            types = [REFERENCE] * len(toks)
        else:
            ref_ranges = [
                (c.start, c.end) for c in span.citations if c.span_type == REFERENCE
            ]
            types = []
            for t in toks:
                ts, te = p.tokens[t]
                inside_ref = any(rs <= ts and te <= re_ for rs, re_ in ref_ranges)
                types.append(REFERENCE if inside_ref else DOMINANT)
        prev = None
        for t, ty in zip(toks, types):
            name = "Dominant" if ty == DOMINANT else "Reference"
            ct[t] = ("I-" if ty == prev else "B-") + name
            prev = ty
    return TagSequence(cs_tags=cs, ct_tags=ct)


def repair_tags(tags: list[str]) -> list[str]:
    """Fix illegal BIO2 transitions: I-X after O or a different type becomes B-X."""
    out = []
    prev_type = None
    for tag in tags:
        if tag.startswith("I"):
            ty = tag[2:] if "-" in tag else ""
            if prev_type != ty:
                tag = "B" + tag[1:]
        if tag == "O":
            prev_type = None
        else:
            prev_type = tag[2:] if "-" in tag else ""
        out.append(tag)
    return out


def _segments(ct_tags: list[str]) -> list[tuple[int, int, str]]:
    """Maximal same-type runs as (first_token, last_token, type); B opens a run."""
    segs = []
    for i, tag in enumerate(ct_tags):
        if tag == "O":
            continue
        ty = DOMINANT if tag.endswith("Dominant") else REFERENCE
        if tag.startswith("B") or not segs or segs[-1][1] != i - 1 or segs[-1][2] != ty:
            segs.append([i, i, ty])
        else:
            segs[-1][1] = i
    return [tuple(s) for s in segs]


def from_bio(tags: TagSequence, paragraph: Paragraph) -> list[CitationSpan]:
    """Decode type tags back into spans.

    Dominant segments separated only by reference segments merge into one
    dominant span (the embedded-reference case); every other segment becomes
    its own span. Illegal transitions are repaired before decoding. Citations
    are reattached from the paragraph's marks, typed by the tag at their
    tokens.
    """
    if len(tags.ct_tags) != len(paragraph.tokens):
        raise SchemaError(
            f"{len(tags.ct_tags)} tags for {len(paragraph.tokens)} tokens"
        )
    ct = repair_tags(tags.ct_tags)
    segs = _segments(ct)

    # Group segments: a run Dom (Ref+ Dom)+ with no O gap merges. A dominant
    # segment directly adjacent to another dominant segment stays separate
    # (B opens a new span); trailing unabsorbed references stay separate too.
    groups: list[list[tuple[int, int, str]]] = []
    i = 0
    while i < len(segs):
        group = [segs[i]]
        if segs[i][2] == DOMINANT:
            j = i + 1
            pending: list[tuple[int, int, str]] = []
            while j < len(segs) and segs[j][0] == (pending[-1] if pending else group[-1])[1] + 1:
                if segs[j][2] == REFERENCE:
                    pending.append(segs[j])
                    j += 1
                elif pending:
                    group.extend(pending)
                    pending = []
                    group.append(segs[j])
                    j += 1
                else:
                    break
        groups.append(group)
        i += len(group)

    spans = []
    for group in groups:
        first_tok = group[0][0]
        last_tok = group[-1][1]
        start = paragraph.tokens[first_tok][0]
        end = paragraph.tokens[last_tok][1]
        span_type = DOMINANT if any(s[2] == DOMINANT for s in group) else REFERENCE
        citations = []
        for m in _marks_inside(paragraph, start, end):
            mark_types = {
                ct[t][2:].lower()
                for t, (ts, te) in enumerate(paragraph.tokens)
                if ts >= m.start and te <= m.end and ct[t] != "O"
            }
            if DOMINANT in mark_types:
                c_type = DOMINANT
            elif REFERENCE in mark_types:
                c_type = REFERENCE
            else:
                c_type = span_type
            citations.append(
                Citation(m.start, m.end, m.bib_key, c_type, m.cited_paper_id)
            )
        spans.append(
            CitationSpan(
                start=start,
                end=end,
                span_type=span_type,
                citations=citations,
                continuation=not citations,
            )
        )
    return spans


def repair_prediction(lp: LabeledParagraph) -> LabeledParagraph:
    """Force a decoded prediction to satisfy every schema invariant.

    Documented repair rules, applied in order:
      1. a span whose citations are all reference but whose tags said
         dominant is retyped reference;
      2. reference spans longer than one sentence are split at sentence
         boundaries, pieces keeping the marks they contain;
      3. citation-less spans with no earlier same-type span are dropped.
    """
    p = lp.paragraph
    sent_bounds = p.sentences
    out: list[CitationSpan] = []
    for span in sorted(lp.spans, key=lambda s: s.start):
        if span.citations and not any(c.span_type == DOMINANT for c in span.citations):
            span = replace(span, span_type=REFERENCE)
        if span.citations and any(c.span_type == DOMINANT for c in span.citations):
            span = replace(span, span_type=DOMINANT)
        pieces = [span]
        if span.span_type == REFERENCE:
            toks = _span_tokens(p, span)
            if toks and len({p.sentence_of_token(t) for t in toks}) > 1:
                pieces = []
                for ss, se in sent_bounds:
                    lo = max(span.start, ss)
                    hi = min(span.end, se)
                    sent_toks = [
                        (ts, te) for ts, te in p.tokens if ts >= lo and te <= hi
                    ]
                    if not sent_toks:
                        continue
                    ps, pe = sent_toks[0][0], sent_toks[-1][1]
                    marks = _marks_inside(p, ps, pe)
                    cites = [
                        c for c in span.citations if c.start >= ps and c.end <= pe
                    ]
                    pieces.append(
                        CitationSpan(
                            ps,
                            pe,
                            REFERENCE,
                            citations=cites,
                            continuation=not marks,
                        )
                    )
        for piece in pieces:
            if not piece.citations:
                piece = replace(piece, continuation=True)
                if not any(
                    s.end <= piece.start and s.span_type == piece.span_type for s in out
                ):
                    continue  # rule 3: orphan continuation is dropped
            out.append(piece)
    return LabeledParagraph(
        paragraph=p,
        sentence_labels=list(lp.sentence_labels),
        spans=out,
        pretag_unavailable=lp.pretag_unavailable,
    )


def build_paragraph(
    text: str,
    citation_marks: list[CitationMark] | None = None,
    paper_id: str | None = None,
    index: int | None = None,
) -> Paragraph:
    """Segment, tokenize, and snap marks for raw paragraph text."""
    if not text:
        raise SchemaError("empty paragraph text")
    sentences = split_sentences(text)
    tokens = tokenize(text, sentences)
    marks = []
    for m in citation_marks or []:
        s, e = snap_to_tokens(m.start, m.end, tokens)
        marks.append(CitationMark(s, e, m.bib_key, m.cited_paper_id))
    marks.sort(key=lambda m: m.start)
    return Paragraph(
        text=text,
        sentences=sentences,
        tokens=tokens,
        citation_marks=marks,
        paper_id=paper_id,
        index=index,
    )
