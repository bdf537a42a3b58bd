"""Seeded synthetic related-work data for tests and demos.

The generator emits labeled paragraphs that always pass schema validation,
with vocabulary correlated to the discourse label and citation-span layout so
that a tagger can actually learn from them. It also wraps paragraphs into
S2ORC-style paper records for exercising the ingestion path end to end.
"""

import random
from dataclasses import dataclass, replace

from rwkit.schema import (
    DISCOURSE_LABELS,
    DOMINANT,
    REFERENCE,
    Citation,
    CitationMark,
    CitationSpan,
    LabeledParagraph,
    build_paragraph,
    validate,
)

_LABEL_WEIGHTS = (
    ("single_summ", 0.30),
    ("transition", 0.24),
    ("narrative_cite", 0.18),
    ("reflection", 0.18),
    ("multi_summ", 0.06),
    ("other", 0.04),
)

_LEXICON = {
    "single_summ": ("proposes", "introduces", "presents", "encoder", "architecture"),
    "multi_summ": ("several", "various", "families", "explored", "jointly"),
    "narrative_cite": ("adopt", "standard", "formulation", "protocol", "setting"),
    "reflection": ("unlike", "contrast", "differs", "whereas", "limitation"),
    "transition": ("turn", "next", "moreover", "finally", "review"),
    "other": ("denote", "formally", "define", "notation", "parameters"),
}

_FILLER = (
    "the", "model", "task", "corpus", "training", "evaluation", "results",
    "features", "baseline", "system", "analysis", "performance", "data",
)

_AUTHORS = ("Kim", "Chen", "Garcia", "Okafor", "Novak", "Tanaka", "Singh", "Moreau")

_SECTION_TITLES = (
    "Related Work",
    "Related Works",
    "2. Related Work",
    "2 RELATED WORKS",
    "II. Related Work",
    "Background and Related Work",
)


@dataclass
class SynthConfig:
    seed: int = 13
    n_paragraphs: int = 40
    min_sentences: int = 2
    max_sentences: int = 6
    cross_sentence_prob: float = 0.15
    embedded_reference_prob: float = 0.3
    availability: float = 0.7
    n_papers: int = 12
    min_year: int = 2015
    max_year: int = 2021


class _KeyGen:
    """Sequential bibliography keys, shared across a paper's paragraphs."""

    def __init__(self) -> None:
        self.count = 0
        self.used: list[str] = []

    def new(self) -> str:
        key = f"BIBREF{self.count}"
        self.count += 1
        self.used.append(key)
        return key


def _pick_label(rng: random.Random) -> str:
    labels, weights = zip(*_LABEL_WEIGHTS)
    return rng.choices(labels, weights=weights)[0]


def _fill(rng: random.Random, label: str, k: int) -> list[str]:
    pools = _LEXICON[label] + _FILLER
    return [rng.choice(pools) for _ in range(k)] + [rng.choice(_LEXICON[label])]


def _nameyear(rng: random.Random) -> str:
    year = rng.randint(2010, 2021)
    form = rng.randrange(3)
    if form == 0:
        return f"({rng.choice(_AUTHORS)}, {year})"
    if form == 1:
        return f"({rng.choice(_AUTHORS)} et al., {year})"
    return f"({rng.choice(_AUTHORS)} and {rng.choice(_AUTHORS)}, {year})"


def _narrative(rng: random.Random) -> str:
    return f"{rng.choice(_AUTHORS)} et al. ({rng.randint(2010, 2021)})"


def _mark_item(rng: random.Random, keys: _KeyGen, ctype: str, narrative: bool = False):
    text = _narrative(rng) if narrative else (
        f"[{keys.count + 1}]" if rng.random() < 0.25 else _nameyear(rng)
    )
    return ("m", text, keys.new(), ctype)


# Sentence builders return (items, spans); items are ("w", word) or
# ("m", text, bib_key, citation_type); spans are (first_item, last_item + 1,
# span_type) over item indices. The final period is appended at assembly time
# and never belongs to an item, so spans in consecutive sentences are always
# separated by at least one tagged-outside token.

def _build_single_summ(rng, keys, config):
    items = [("w", w) for w in _fill(rng, "single_summ", rng.randint(1, 2))]
    items.append(_mark_item(rng, keys, DOMINANT))
    items += [("w", w) for w in _fill(rng, "single_summ", rng.randint(2, 4))]
    if rng.random() < config.embedded_reference_prob:
        slot = rng.randint(1, len(items) - 1)
        items.insert(slot, _mark_item(rng, keys, REFERENCE))
    return items, [(0, len(items), DOMINANT)]


def _build_multi_summ(rng, keys, config):
    items = [("w", w) for w in _fill(rng, "multi_summ", 1)]
    items.append(_mark_item(rng, keys, DOMINANT))
    items += [("w", w) for w in _fill(rng, "multi_summ", rng.randint(1, 2))]
    items.append(_mark_item(rng, keys, DOMINANT))
    items += [("w", w) for w in _fill(rng, "multi_summ", 1)]
    return items, [(0, len(items), DOMINANT)]


def _build_narrative_cite(rng, keys, config):
    items = [_mark_item(rng, keys, REFERENCE, narrative=True)]
    tail = rng.randint(0, 1)
    span_end = 1 + tail
    items += [("w", w) for w in _fill(rng, "narrative_cite", rng.randint(2, 4))]
    return items, [(0, span_end, REFERENCE)]


def _build_reflection(rng, keys, config):
    items = [("w", w) for w in _fill(rng, "reflection", rng.randint(2, 4))]
    if rng.random() < 0.5:
        a = len(items)
        items.append(_mark_item(rng, keys, REFERENCE))
        spans = [(a, a + 1, REFERENCE)]
    else:
        spans = []
    items += [("w", w) for w in _fill(rng, "reflection", 1)]
    return items, spans


def _build_plain(label):
    def build(rng, keys, config):
        return [("w", w) for w in _fill(rng, label, rng.randint(3, 6))], []

    return build


_BUILDERS = {
    "single_summ": _build_single_summ,
    "multi_summ": _build_multi_summ,
    "narrative_cite": _build_narrative_cite,
    "reflection": _build_reflection,
    "transition": _build_plain("transition"),
    "other": _build_plain("other"),
}


def make_labeled_paragraph(
    rng: random.Random,
    config: SynthConfig | None = None,
    keys: _KeyGen | None = None,
    paper_id: str | None = None,
    index: int | None = None,
) -> LabeledParagraph:
    config = config or SynthConfig()
    keys = keys or _KeyGen()
    n = rng.randint(config.min_sentences, config.max_sentences)

    sentences: list[tuple[str, list]] = []
    # Span plans as (sentence, item, sentence, item_end_exclusive, type).
    plans: list[tuple[int, int, int, int, str]] = []
    while len(sentences) < n:
        label = _pick_label(rng)
        si = len(sentences)
        if (
            label == "single_summ"
            and si + 2 <= n
            and rng.random() < config.cross_sentence_prob
        ):
            first = [("w", w) for w in _fill(rng, "single_summ", 1)]
            first.append(_mark_item(rng, keys, DOMINANT))
            first += [("w", w) for w in _fill(rng, "single_summ", 1)]
            second = [("w", w) for w in _fill(rng, "single_summ", 2)]
            second.append(_mark_item(rng, keys, DOMINANT))
            second += [("w", w) for w in _fill(rng, "single_summ", 1)]
            cut = rng.randint(len(second) - 1, len(second))
            sentences.append(("single_summ", first))
            sentences.append(("single_summ", second))
            plans.append((si, 0, si + 1, cut, DOMINANT))
        else:
            items, local = _BUILDERS[label](rng, keys, config)
            sentences.append((label, items))
            plans.extend((si, a, si, b, ty) for a, b, ty in local)

    # Assemble text with exact offsets; capitalize sentence-initial words so
    # the sentence splitter sees every boundary.
    chunks: list[str] = []
    cursor = 0
    offsets: dict[tuple[int, int], tuple[int, int]] = {}
    mark_items: dict[tuple[int, int], tuple] = {}
    for si, (label, items) in enumerate(sentences):
        if si:
            chunks.append(" ")
            cursor += 1
        for ii, item in enumerate(items):
            if ii:
                chunks.append(" ")
                cursor += 1
            text = item[1]
            if ii == 0 and item[0] == "w":
                text = text[0].upper() + text[1:]
            offsets[(si, ii)] = (cursor, cursor + len(text))
            chunks.append(text)
            cursor += len(text)
            if item[0] == "m":
                mark_items[(si, ii)] = item
        chunks.append(".")
        cursor += 1
    text = "".join(chunks)

    marks = [
        CitationMark(offsets[pos][0], offsets[pos][1], item[2])
        for pos, item in sorted(mark_items.items())
    ]
    spans = []
    for si, a, sj, b, ty in plans:
        citations = [
            Citation(offsets[pos][0], offsets[pos][1], item[2], item[3])
            for pos, item in sorted(mark_items.items())
            if (si, a) <= pos and pos < (sj, b)
        ]
        spans.append(
            CitationSpan(
                start=offsets[(si, a)][0],
                end=offsets[(sj, b - 1)][1],
                span_type=ty,
                citations=citations,
            )
        )
    spans.sort(key=lambda s: s.start)

    paragraph = build_paragraph(text, marks, paper_id=paper_id, index=index)
    labeled = LabeledParagraph(
        paragraph=paragraph,
        sentence_labels=[label for label, _ in sentences],
        spans=spans,
    )
    problems = validate(labeled)
    if problems:
        raise AssertionError(f"generator produced invalid paragraph: {problems}")
    return labeled


def make_labeled_corpus(config: SynthConfig | None = None) -> list[LabeledParagraph]:
    config = config or SynthConfig()
    rng = random.Random(config.seed)
    out = []
    per_paper = 4
    for i in range(config.n_paragraphs):
        out.append(
            make_labeled_paragraph(
                rng,
                config,
                paper_id=f"P{i // per_paper:03d}",
                index=i % per_paper,
            )
        )
    return out


def _intro_block() -> dict:
    return {
        "section": "Introduction",
        "text": "We study the problem of modeling citation structure at scale.",
        "cite_spans": [],
    }


def make_paper_record(
    rng: random.Random, config: SynthConfig, paper_id: str
) -> tuple[dict, list[LabeledParagraph]]:
    """One S2ORC-style record plus the gold labels for its related work."""
    keys = _KeyGen()
    gold = [
        make_labeled_paragraph(rng, config, keys=keys, paper_id=paper_id, index=i)
        for i in range(rng.randint(1, 3))
    ]
    title = rng.choice(_SECTION_TITLES)
    blocks = [_intro_block()]
    for lp in gold:
        blocks.append(
            {
                "section": title,
                "text": lp.paragraph.text,
                "cite_spans": [
                    {"start": m.start, "end": m.end, "ref_id": m.bib_key}
                    for m in lp.paragraph.citation_marks
                ],
            }
        )
    blocks.append(
        {"section": "Conclusion", "text": "We conclude with future work.", "cite_spans": []}
    )
    bib_entries = {}
    for key in keys.used:
        available = rng.random() < config.availability
        bib_entries[key] = {
            "title": f"A study of {rng.choice(_FILLER)} {rng.choice(_FILLER)}",
            "year": rng.randint(2008, 2021),
            "link": str(rng.randint(10000, 99999)) if available else None,
        }
    year = None if rng.random() < 0.1 else rng.randint(config.min_year, config.max_year)
    record = {
        "paper_id": paper_id,
        "title": f"On {rng.choice(_FILLER)} for {rng.choice(_FILLER)}",
        "abstract": f"We present a method for {rng.choice(_FILLER)}.",
        "year": year,
        "body_text": blocks,
        "bib_entries": bib_entries,
    }
    return record, gold


def make_s2orc_corpus(
    config: SynthConfig | None = None,
) -> tuple[list[dict], dict[str, list[LabeledParagraph]]]:
    """Records for ingestion plus gold labels keyed by paper id.

    One in five papers has no related-work section at all, which the
    extractor must skip without error.
    """
    config = config or SynthConfig()
    rng = random.Random(config.seed)
    records, gold = [], {}
    for i in range(config.n_papers):
        paper_id = f"S{i:03d}"
        if rng.random() < 0.2:
            records.append(
                {
                    "paper_id": paper_id,
                    "title": "A paper without a survey section",
                    "year": rng.randint(config.min_year, config.max_year),
                    "body_text": [_intro_block()],
                    "bib_entries": {},
                }
            )
            continue
        record, lps = make_paper_record(rng, config, paper_id)
        records.append(record)
        gold[paper_id] = lps
    return records, gold


def assign_cited_ids(
    corpus: list[LabeledParagraph], rng: random.Random, availability: float = 0.8
) -> tuple[list[LabeledParagraph], dict[str, str]]:
    """Resolve a share of citation marks to fresh cited-paper ids and write a
    matching document per id whose text overlaps the citing span's content,
    so retrieval back to the cited document is learnable.
    """
    out, documents = [], {}
    counter = 0
    for lp in corpus:
        key_to_id: dict[str, str | None] = {}
        for m in lp.paragraph.citation_marks:
            if m.bib_key not in key_to_id:
                if rng.random() < availability:
                    key_to_id[m.bib_key] = f"C{counter:04d}"
                    counter += 1
                else:
                    key_to_id[m.bib_key] = None
        marks = [
            replace(m, cited_paper_id=key_to_id[m.bib_key])
            for m in lp.paragraph.citation_marks
        ]
        paragraph = replace(lp.paragraph, citation_marks=marks)
        spans = []
        for span in lp.spans:
            citations = [
                replace(c, cited_paper_id=key_to_id.get(c.bib_key))
                for c in span.citations
            ]
            spans.append(replace(span, citations=citations))
            content, pos = [], span.start
            for c in sorted(citations, key=lambda c: c.start):
                content.append(lp.paragraph.text[pos : c.start])
                pos = c.end
            content.append(lp.paragraph.text[pos : span.end])
            words = " ".join("".join(content).split())
            for c in citations:
                if c.cited_paper_id and c.cited_paper_id not in documents:
                    documents[c.cited_paper_id] = (
                        f"We propose {words} and report gains on "
                        f"{rng.choice(_FILLER)} {rng.choice(_FILLER)}."
                    )
        out.append(replace(lp, paragraph=paragraph, spans=spans))
    return out, documents


def label_histogram(corpus: list[LabeledParagraph]) -> dict[str, int]:
    counts = {label: 0 for label in DISCOURSE_LABELS}
    for lp in corpus:
        for label in lp.sentence_labels:
            counts[label] += 1
    return counts
