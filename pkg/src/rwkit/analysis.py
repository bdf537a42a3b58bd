"""Corpus analyses over labeled related-work paragraphs.

Counting conventions matter here and are deliberately mixed:

- Discourse label counts and shares are per sentence.
- Joint and conditional statistics over (citation type, discourse label) are
  per span; a span's discourse label is the label of the sentence containing
  the span's first token. The two views are not interchangeable because one
  sentence can hold several spans and a span can cross sentences.
"""

import statistics
from dataclasses import dataclass, field

from rwkit import patterns as patterns_mod
from rwkit.metrics import rouge_scores
from rwkit.schema import (
    CITATION_TYPES,
    DISCOURSE_LABELS,
    DOMINANT,
    REFERENCE,
    CitationSpan,
    LabeledParagraph,
    Paragraph,
)


def sentence_index_of_offset(paragraph: Paragraph, offset: int) -> int:
    for i, (s, e) in enumerate(paragraph.sentences):
        if s <= offset < e:
            return i
    raise ValueError(f"offset {offset} outside paragraph")


def span_label(lp: LabeledParagraph, span: CitationSpan) -> str:
    return lp.sentence_labels[sentence_index_of_offset(lp.paragraph, span.start)]


def text_without_marks(lp: LabeledParagraph, span: CitationSpan) -> str:
    """Span text with the character ranges of its citation marks removed."""
    cuts = sorted((c.start, c.end) for c in span.citations)
    out, pos = [], span.start
    for s, e in cuts:
        out.append(lp.paragraph.text[pos:s])
        pos = e
    out.append(lp.paragraph.text[pos : span.end])
    return " ".join("".join(out).split())


@dataclass
class CooccurrenceTable:
    n_paragraphs: int
    n_sentences: int
    sentence_counts: dict[str, int]
    sentence_shares: dict[str, float]
    span_counts: dict[str, int]
    joint_counts: dict[str, dict[str, int]]
    joint_shares: dict[str, dict[str, float]]
    label_given_type: dict[str, dict[str, float]]
    type_given_label: dict[str, dict[str, float]]

    def to_dict(self) -> dict:
        return self.__dict__.copy()


def cooccurrence_stats(corpus: list[LabeledParagraph]) -> CooccurrenceTable:
    sentence_counts = {label: 0 for label in DISCOURSE_LABELS}
    joint = {t: {label: 0 for label in DISCOURSE_LABELS} for t in CITATION_TYPES}
    n_sentences = 0
    for lp in corpus:
        n_sentences += len(lp.sentence_labels)
        for label in lp.sentence_labels:
            sentence_counts[label] += 1
        for span in lp.spans:
            joint[span.span_type][span_label(lp, span)] += 1

    span_counts = {t: sum(joint[t].values()) for t in CITATION_TYPES}
    n_spans = sum(span_counts.values())
    sentence_shares = {
        label: count / n_sentences if n_sentences else 0.0
        for label, count in sentence_counts.items()
    }
    joint_shares = {
        t: {
            label: joint[t][label] / n_spans if n_spans else 0.0
            for label in DISCOURSE_LABELS
        }
        for t in CITATION_TYPES
    }
    label_given_type = {
        t: {
            label: joint[t][label] / span_counts[t] if span_counts[t] else 0.0
            for label in DISCOURSE_LABELS
        }
        for t in CITATION_TYPES
    }
    type_given_label = {}
    for t in CITATION_TYPES:
        type_given_label[t] = {}
        for label in DISCOURSE_LABELS:
            spans_with_label = sum(joint[u][label] for u in CITATION_TYPES)
            type_given_label[t][label] = (
                joint[t][label] / spans_with_label if spans_with_label else 0.0
            )
    return CooccurrenceTable(
        n_paragraphs=len(corpus),
        n_sentences=n_sentences,
        sentence_counts=sentence_counts,
        sentence_shares=sentence_shares,
        span_counts=span_counts,
        joint_counts=joint,
        joint_shares=joint_shares,
        label_given_type=label_given_type,
        type_given_label=type_given_label,
    )


@dataclass
class LengthSummary:
    count: int = 0
    mean: float = 0.0
    median: float = 0.0
    minimum: int = 0
    maximum: int = 0

    @staticmethod
    def of(lengths: list[int]) -> "LengthSummary":
        if not lengths:
            return LengthSummary()
        return LengthSummary(
            count=len(lengths),
            mean=statistics.fmean(lengths),
            median=float(statistics.median(lengths)),
            minimum=min(lengths),
            maximum=max(lengths),
        )

    def to_dict(self) -> dict:
        return self.__dict__.copy()


def span_content_tokens(lp: LabeledParagraph, span: CitationSpan) -> int:
    """Token count of a span excluding tokens inside its citation marks."""
    n = 0
    for ts, te in lp.paragraph.tokens:
        if ts < span.start or te > span.end:
            continue
        if any(c.start <= ts and te <= c.end for c in span.citations):
            continue
        n += 1
    return n


def span_length_stats(corpus: list[LabeledParagraph]) -> dict[str, LengthSummary]:
    lengths = {t: [] for t in CITATION_TYPES}
    for lp in corpus:
        for span in lp.spans:
            lengths[span.span_type].append(span_content_tokens(lp, span))
    return {t: LengthSummary.of(v) for t, v in lengths.items()}


@dataclass
class StyleProfile:
    descriptive: int = 0
    integrative: int = 0
    mixed: int = 0
    neither: int = 0

    @property
    def classified(self) -> int:
        return self.descriptive + self.integrative + self.mixed

    def shares(self) -> dict[str, float]:
        n = self.classified
        if not n:
            return {"descriptive": 0.0, "integrative": 0.0, "mixed": 0.0}
        return {
            "descriptive": self.descriptive / n,
            "integrative": self.integrative / n,
            "mixed": self.mixed / n,
        }

    def to_dict(self) -> dict:
        return {
            "counts": {
                "descriptive": self.descriptive,
                "integrative": self.integrative,
                "mixed": self.mixed,
                "neither": self.neither,
            },
            "shares": self.shares(),
        }


def style_profile(corpus: list[LabeledParagraph]) -> StyleProfile:
    """Paragraph writing style from span types: all-dominant paragraphs are
    descriptive, all-reference integrative, both mixed. Paragraphs with no
    spans are counted but excluded from the shares.
    """
    profile = StyleProfile()
    for lp in corpus:
        types = {span.span_type for span in lp.spans}
        if types == {DOMINANT}:
            profile.descriptive += 1
        elif types == {REFERENCE}:
            profile.integrative += 1
        elif types:
            profile.mixed += 1
        else:
            profile.neither += 1
    return profile


def label_sequences(corpus: list[LabeledParagraph]) -> list[list[str]]:
    return [list(lp.sentence_labels) for lp in corpus]


def mine_label_patterns(
    corpus: list[LabeledParagraph], query: patterns_mod.PatternQuery | None = None
) -> list[patterns_mod.Pattern]:
    return patterns_mod.mine_patterns(label_sequences(corpus), query)


@dataclass
class RetrievalReport:
    mean_similarity: dict[str, float] = field(default_factory=dict)
    top1_accuracy: dict[str, float] = field(default_factory=dict)
    counts: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return self.__dict__.copy()


def _retrieval_units(corpus: list[LabeledParagraph]):
    """(unit kind, mark-stripped query text, cited paper id) triples.

    Span units use the span text; sentence units use the whole sentence
    containing the span's first token. Spans whose citations disagree on the
    cited paper contribute one unit per resolved citation.
    """
    for lp in corpus:
        for span in lp.spans:
            si = sentence_index_of_offset(lp.paragraph, span.start)
            ss, se = lp.paragraph.sentences[si]
            sentence_unit = text_without_marks(
                lp, CitationSpan(ss, se, span.span_type, span.citations)
            )
            span_unit = text_without_marks(lp, span)
            for citation in span.citations:
                if citation.cited_paper_id is None:
                    continue
                kind = "dominant" if span.span_type == DOMINANT else "reference"
                yield f"{kind}_span", span_unit, citation.cited_paper_id
                yield f"{kind}_sentence", sentence_unit, citation.cited_paper_id


def retrieval_compare(
    corpus: list[LabeledParagraph], documents: dict[str, str]
) -> RetrievalReport:
    """Score how well each citation unit points back at the cited document.

    For every resolved citation we measure the mean of ROUGE-1 and ROUGE-2
    recall of the cited document against the unit text, and whether the true
    document scores strictest-best among all candidate documents.
    """
    report = RetrievalReport()
    sims: dict[str, list[float]] = {}
    hits: dict[str, list[bool]] = {}
    for kind, query, cited_id in _retrieval_units(corpus):
        if cited_id not in documents:
            continue
        scored = {
            doc_id: rouge_scores(query, doc).r12_avg
            for doc_id, doc in documents.items()
        }
        best = max(sorted(scored), key=lambda d: scored[d])
        sims.setdefault(kind, []).append(scored[cited_id])
        hits.setdefault(kind, []).append(best == cited_id)
    for kind, values in sims.items():
        report.mean_similarity[kind] = sum(values) / len(values)
        report.top1_accuracy[kind] = sum(hits[kind]) / len(hits[kind])
        report.counts[kind] = len(values)
    return report


def span_sentence_ratio(corpus: list[LabeledParagraph]) -> dict:
    """Dominant span extent relative to the sentence holding its first token.

    Spans reaching into another sentence are longer; single-sentence spans
    are equal when they cover every content token of the sentence (trailing
    punctuation-only tokens do not count) and shorter otherwise.
    """
    counts = {"shorter": 0, "equal": 0, "longer": 0}
    for lp in corpus:
        for span in lp.spans:
            if span.span_type != DOMINANT:
                continue
            para = lp.paragraph
            first = sentence_index_of_offset(para, span.start)
            last = sentence_index_of_offset(para, span.end - 1)
            if last > first:
                counts["longer"] += 1
                continue
            ss, se = para.sentences[first]
            sentence_tokens = [(ts, te) for ts, te in para.tokens if ss <= ts < se]
            while sentence_tokens and not any(
                ch.isalnum() for ch in para.text[slice(*sentence_tokens[-1])]
            ):
                sentence_tokens.pop()
            covered = [
                (ts, te)
                for ts, te in sentence_tokens
                if span.start <= ts and te <= span.end
            ]
            counts["equal" if len(covered) == len(sentence_tokens) else "shorter"] += 1
    total = sum(counts.values())
    shares = {k: v / total if total else 0.0 for k, v in counts.items()}
    return {"counts": counts, "shares": shares}
