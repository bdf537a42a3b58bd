import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from rwkit.schema import (
    CS_TAGS,
    CT_TAGS,
    DOMINANT,
    REFERENCE,
    Citation,
    CitationMark,
    CitationSpan,
    LabeledParagraph,
    Paragraph,
    SchemaError,
    TagSequence,
    build_paragraph,
    from_bio,
    repair_prediction,
    repair_tags,
    to_bio,
    validate,
)
from rwkit.synth import SynthConfig, make_labeled_corpus


def mark(text, surface, bib_key, offset=0):
    s = text.index(surface, offset)
    return CitationMark(s, s + len(surface), bib_key)


def cite(m, span_type):
    return Citation(m.start, m.end, m.bib_key, span_type, m.cited_paper_id)


def rules(lp):
    return {v.rule for v in validate(lp)}


def canon(spans):
    return [
        (
            s.start,
            s.end,
            s.span_type,
            s.continuation,
            tuple(sorted((c.start, c.end, c.bib_key, c.span_type) for c in s.citations)),
        )
        for s in sorted(spans, key=lambda s: s.start)
    ]


@pytest.fixture
def simple():
    text = "Kim (2019) proposes parsing. We build on it."
    m = mark(text, "Kim (2019)", "b0")
    p = build_paragraph(text, [m])
    span = CitationSpan(m.start, m.end, DOMINANT, [cite(m, DOMINANT)])
    return LabeledParagraph(p, ["single_summ", "reflection"], [span])


@pytest.fixture
def embedded():
    # A reference mark strictly inside a dominant span: the canonical case the
    # flatten/decode pair must survive.
    text = "Kim (2019) builds on BERT (Devlin, 2019) ideas strongly."
    m_dom = mark(text, "Kim (2019)", "b0")
    m_ref = mark(text, "(Devlin, 2019)", "b1")
    p = build_paragraph(text, [m_dom, m_ref])
    span = CitationSpan(
        0, len(text) - 1, DOMINANT, [cite(m_dom, DOMINANT), cite(m_ref, REFERENCE)]
    )
    return LabeledParagraph(p, ["single_summ"], [span])


class TestParagraph:
    def test_build_paragraph_rejects_empty_text(self):
        with pytest.raises(SchemaError):
            build_paragraph("")

    def test_marks_snapped_and_sorted(self):
        text = "See Lee (2020) and Kim (2019)."
        raw = [CitationMark(20, 28, "b1"), CitationMark(5, 13, "b0")]
        p = build_paragraph(text, raw)
        assert [m.bib_key for m in p.citation_marks] == ["b0", "b1"]
        starts = {t[0] for t in p.tokens}
        ends = {t[1] for t in p.tokens}
        for m in p.citation_marks:
            assert m.start in starts and m.end in ends

    def test_token_texts(self, simple):
        assert simple.paragraph.token_texts()[:4] == ["Kim", "(", "2019", ")"]

    def test_sentence_of_token(self, simple):
        p = simple.paragraph
        assert p.sentence_of_token(0) == 0
        assert p.sentence_of_token(len(p.tokens) - 1) == 1

    def test_sentence_token_bounds_partition_tokens(self, simple):
        p = simple.paragraph
        bounds = p.sentence_token_bounds()
        assert bounds[0][0] == 0
        assert bounds[-1][1] == len(p.tokens)
        for (_, e1), (s2, _) in zip(bounds, bounds[1:]):
            assert e1 == s2


class TestValidate:
    def test_valid_paragraph_is_clean(self, simple):
        assert validate(simple) == []

    def test_label_count(self, simple):
        simple.sentence_labels = ["single_summ"]
        assert "label_count" in rules(simple)

    def test_label_value(self, simple):
        simple.sentence_labels = ["single_summ", "bogus"]
        assert "label_value" in rules(simple)

    def test_sentence_tiling_gap(self):
        p = Paragraph("ab cd", sentences=[(0, 2), (3, 5)], tokens=[(0, 2), (3, 5)])
        assert "sentence_tiling" in rules(LabeledParagraph(p, ["other", "other"]))

    def test_sentence_tiling_short(self):
        p = Paragraph("ab cd", sentences=[(0, 2)], tokens=[(0, 2)])
        assert "sentence_tiling" in rules(LabeledParagraph(p, ["other"]))

    def test_mark_alignment(self):
        p = Paragraph(
            "abc def",
            sentences=[(0, 7)],
            tokens=[(0, 3), (4, 7)],
            citation_marks=[CitationMark(1, 3, "b0")],
        )
        assert "mark_alignment" in rules(LabeledParagraph(p, ["other"]))

    def test_span_bounds(self, simple):
        simple.spans[0] = CitationSpan(0, 999, DOMINANT, simple.spans[0].citations)
        assert "span_bounds" in rules(simple)

    def test_span_type(self, simple):
        simple.spans[0].span_type = "weird"
        assert "span_type" in rules(simple)

    def test_span_overlap(self):
        text = "Kim (2019) and Lee (2020) work."
        m0, m1 = mark(text, "Kim (2019)", "b0"), mark(text, "Lee (2020)", "b1")
        p = build_paragraph(text, [m0, m1])
        spans = [
            CitationSpan(m0.start, m1.end, DOMINANT, [cite(m0, DOMINANT), cite(m1, DOMINANT)]),
            CitationSpan(m1.start, m1.end, DOMINANT, [cite(m1, DOMINANT)]),
        ]
        assert "span_overlap" in rules(LabeledParagraph(p, ["single_summ"], spans))

    def test_span_alignment(self, simple):
        simple.spans[0] = CitationSpan(1, 10, DOMINANT, [], continuation=True)
        assert "span_alignment" in rules(simple)

    def test_span_citations(self, simple):
        simple.spans[0].citations = [Citation(0, 10, "wrong", DOMINANT)]
        assert "span_citations" in rules(simple)

    def test_citation_type(self, simple):
        simple.spans[0].citations[0].span_type = "weird"
        assert "citation_type" in rules(simple)

    def test_dominant_rule(self, simple):
        simple.spans[0].span_type = REFERENCE
        assert "dominant_rule" in rules(simple)

    def test_empty_span(self, simple):
        text = simple.paragraph.text
        s = text.index("We")
        simple.spans.append(CitationSpan(s, s + 2, REFERENCE, []))
        assert "empty_span" in rules(simple)

    def test_orphan_continuation(self, simple):
        text = simple.paragraph.text
        s = text.index("We")
        simple.spans.append(CitationSpan(s, s + 2, REFERENCE, [], continuation=True))
        assert "continuation" in rules(simple)

    def test_continuation_after_same_type_is_valid(self):
        text = "Kim (2019) helps. Still early."
        m = mark(text, "Kim (2019)", "b0")
        p = build_paragraph(text, [m])
        s = text.index("Still")
        spans = [
            CitationSpan(m.start, m.end, REFERENCE, [cite(m, REFERENCE)]),
            CitationSpan(s, s + 5, REFERENCE, [], continuation=True),
        ]
        lp = LabeledParagraph(p, ["narrative_cite", "reflection"], spans)
        assert validate(lp) == []

    def test_reference_span_length(self):
        text = "Kim (2019). Lee (2020)."
        m0, m1 = mark(text, "Kim (2019)", "b0"), mark(text, "Lee (2020)", "b1")
        p = build_paragraph(text, [m0, m1])
        span = CitationSpan(0, m1.end, REFERENCE, [cite(m0, REFERENCE), cite(m1, REFERENCE)])
        lp = LabeledParagraph(p, ["narrative_cite", "narrative_cite"], [span])
        assert "reference_span_length" in rules(lp)

    def test_edge_reference(self):
        text = "(Devlin, 2019) inspires Kim (2019) deeply."
        m_ref = mark(text, "(Devlin, 2019)", "b0")
        m_dom = mark(text, "Kim (2019)", "b1")
        p = build_paragraph(text, [m_ref, m_dom])
        span = CitationSpan(0, m_dom.end, DOMINANT, [cite(m_ref, REFERENCE), cite(m_dom, DOMINANT)])
        lp = LabeledParagraph(p, ["single_summ"], [span])
        assert "edge_reference" in rules(lp)

    def test_ambiguous_adjacency(self):
        text = "Kim (2019) (Lee, 2020) Park (2021) study."
        m0 = mark(text, "Kim (2019)", "b0")
        m1 = mark(text, "(Lee, 2020)", "b1")
        m2 = mark(text, "Park (2021)", "b2")
        p = build_paragraph(text, [m0, m1, m2])
        spans = [
            CitationSpan(m0.start, m0.end, DOMINANT, [cite(m0, DOMINANT)]),
            CitationSpan(m1.start, m1.end, REFERENCE, [cite(m1, REFERENCE)]),
            CitationSpan(m2.start, m2.end, DOMINANT, [cite(m2, DOMINANT)]),
        ]
        lp = LabeledParagraph(p, ["single_summ"], spans)
        assert rules(lp) == {"ambiguous_adjacency"}

    def test_adjacency_broken_by_plain_token_is_valid(self):
        text = "Kim (2019) (Lee, 2020) and Park (2021) study."
        m0 = mark(text, "Kim (2019)", "b0")
        m1 = mark(text, "(Lee, 2020)", "b1")
        m2 = mark(text, "Park (2021)", "b2")
        p = build_paragraph(text, [m0, m1, m2])
        spans = [
            CitationSpan(m0.start, m0.end, DOMINANT, [cite(m0, DOMINANT)]),
            CitationSpan(m1.start, m1.end, REFERENCE, [cite(m1, REFERENCE)]),
            CitationSpan(m2.start, m2.end, DOMINANT, [cite(m2, DOMINANT)]),
        ]
        lp = LabeledParagraph(p, ["single_summ"], spans)
        assert validate(lp) == []


class TestToBio:
    def test_simple_span_tags(self, simple):
        tags = to_bio(simple)
        n = len(simple.paragraph.tokens)
        assert tags.cs_tags == ["B", "I", "I", "I"] + ["O"] * (n - 4)
        assert tags.ct_tags == (
            ["B-Dominant", "I-Dominant", "I-Dominant", "I-Dominant"] + ["O"] * (n - 4)
        )

    def test_embedded_reference_flattens_to_segments(self, embedded):
        tags = to_bio(embedded)
        assert tags.cs_tags == ["B"] + ["I"] * 13 + ["O"]
        assert tags.ct_tags == (
            ["B-Dominant"] + ["I-Dominant"] * 6
            + ["B-Reference"] + ["I-Reference"] * 4
            + ["B-Dominant", "I-Dominant", "O"]
        )

    def test_refuses_invalid_annotation(self, simple):
        simple.sentence_labels = ["single_summ"]
        with pytest.raises(SchemaError):
            to_bio(simple)

    def test_all_tags_in_inventory(self, small_corpus):
        for lp in small_corpus:
            tags = to_bio(lp)
            assert set(tags.cs_tags) <= set(CS_TAGS)
            assert set(tags.ct_tags) <= set(CT_TAGS)


class TestRepairTags:
    def test_leading_i_becomes_b(self):
        assert repair_tags(["I-Dominant"]) == ["B-Dominant"]

    def test_i_after_o_becomes_b(self):
        assert repair_tags(["B-Dominant", "O", "I-Dominant"]) == [
            "B-Dominant",
            "O",
            "B-Dominant",
        ]

    def test_i_after_other_type_becomes_b(self):
        assert repair_tags(["B-Reference", "I-Dominant"]) == ["B-Reference", "B-Dominant"]

    def test_legal_sequence_unchanged(self):
        tags = ["B-Dominant", "I-Dominant", "O", "B-Reference", "I-Reference"]
        assert repair_tags(tags) == tags

    def test_untyped_span_tags(self):
        assert repair_tags(["I", "I", "O", "I"]) == ["B", "I", "O", "B"]


class TestFromBio:
    def test_length_mismatch_raises(self, simple):
        with pytest.raises(SchemaError):
            from_bio(TagSequence(["O"], ["O"]), simple.paragraph)

    def test_embedded_reference_merges_back(self, embedded):
        decoded = from_bio(to_bio(embedded), embedded.paragraph)
        assert canon(decoded) == canon(embedded.spans)

    def test_adjacent_dominant_spans_stay_separate(self):
        text = "Kim (2019) Lee (2020) study."
        m0, m1 = mark(text, "Kim (2019)", "b0"), mark(text, "Lee (2020)", "b1")
        p = build_paragraph(text, [m0, m1])
        ct = ["B-Dominant", "I-Dominant", "I-Dominant", "I-Dominant"] * 2 + ["O", "O"]
        cs = ["B", "I", "I", "I"] * 2 + ["O", "O"]
        decoded = from_bio(TagSequence(cs, ct), p)
        assert len(decoded) == 2
        assert [s.span_type for s in decoded] == [DOMINANT, DOMINANT]
        assert [s.citations[0].bib_key for s in decoded] == ["b0", "b1"]

    def test_trailing_reference_not_absorbed(self):
        text = "Kim (2019) (Lee, 2020) study."
        m0, m1 = mark(text, "Kim (2019)", "b0"), mark(text, "(Lee, 2020)", "b1")
        p = build_paragraph(text, [m0, m1])
        ct = (
            ["B-Dominant", "I-Dominant", "I-Dominant", "I-Dominant"]
            + ["B-Reference"] + ["I-Reference"] * 4
            + ["O", "O"]
        )
        cs = ["B", "I", "I", "I", "B", "I", "I", "I", "I", "O", "O"]
        decoded = from_bio(TagSequence(cs, ct), p)
        assert [(s.span_type, s.start, s.end) for s in decoded] == [
            (DOMINANT, m0.start, m0.end),
            (REFERENCE, m1.start, m1.end),
        ]

    def test_markless_segment_becomes_continuation(self, simple):
        p = simple.paragraph
        n = len(p.tokens)
        ct = ["O"] * n
        w = p.token_texts().index("build")
        ct[w] = "B-Dominant"
        ct[w + 1] = "I-Dominant"
        decoded = from_bio(TagSequence(["O"] * n, ct), p)
        assert len(decoded) == 1
        assert decoded[0].continuation and decoded[0].citations == []

    def test_repairs_before_decoding(self, simple):
        p = simple.paragraph
        n = len(p.tokens)
        ct = ["I-Dominant", "I-Dominant", "I-Dominant", "I-Dominant"] + ["O"] * (n - 4)
        decoded = from_bio(TagSequence(["O"] * n, ct), p)
        assert canon(decoded) == canon(simple.spans)


class TestRoundTrip:
    def test_corpus_round_trips(self, small_corpus):
        for lp in small_corpus:
            decoded = from_bio(to_bio(lp), lp.paragraph)
            assert canon(decoded) == canon(lp.spans)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10_000))
    def test_random_corpora_round_trip(self, seed):
        for lp in make_labeled_corpus(SynthConfig(seed=seed, n_paragraphs=3)):
            assert validate(lp) == []
            decoded = from_bio(to_bio(lp), lp.paragraph)
            assert canon(decoded) == canon(lp.spans)


class TestRepairPrediction:
    def test_retypes_span_without_dominant_citation(self):
        text = "Kim (2019). We agree."
        m = mark(text, "Kim (2019)", "b0")
        p = build_paragraph(text, [m])
        lp = LabeledParagraph(
            p,
            ["narrative_cite", "reflection"],
            [CitationSpan(m.start, m.end, DOMINANT, [cite(m, REFERENCE)])],
        )
        fixed = repair_prediction(lp)
        assert fixed.spans[0].span_type == REFERENCE
        assert validate(fixed) == []

    def test_retypes_span_with_dominant_citation(self):
        text = "Kim (2019). We agree."
        m = mark(text, "Kim (2019)", "b0")
        p = build_paragraph(text, [m])
        lp = LabeledParagraph(
            p,
            ["single_summ", "reflection"],
            [CitationSpan(m.start, m.end, REFERENCE, [cite(m, DOMINANT)])],
        )
        fixed = repair_prediction(lp)
        assert fixed.spans[0].span_type == DOMINANT
        assert validate(fixed) == []

    def test_splits_multi_sentence_reference_span(self):
        text = "Kim (2019). Lee (2020)."
        m0, m1 = mark(text, "Kim (2019)", "b0"), mark(text, "Lee (2020)", "b1")
        p = build_paragraph(text, [m0, m1])
        span = CitationSpan(0, m1.end, REFERENCE, [cite(m0, REFERENCE), cite(m1, REFERENCE)])
        lp = LabeledParagraph(p, ["narrative_cite", "narrative_cite"], [span])
        fixed = repair_prediction(lp)
        assert len(fixed.spans) == 2
        assert [c.bib_key for s in fixed.spans for c in s.citations] == ["b0", "b1"]
        assert validate(fixed) == []

    def test_split_keeps_markless_piece_as_continuation(self):
        text = "Kim (2019) helps. Still early."
        m = mark(text, "Kim (2019)", "b0")
        p = build_paragraph(text, [m])
        end = text.index("early") + 5
        span = CitationSpan(0, end, REFERENCE, [cite(m, REFERENCE)])
        lp = LabeledParagraph(p, ["narrative_cite", "reflection"], [span])
        fixed = repair_prediction(lp)
        assert len(fixed.spans) == 2
        assert fixed.spans[1].continuation and fixed.spans[1].citations == []
        assert validate(fixed) == []

    def test_drops_orphan_markless_span(self):
        text = "We agree strongly."
        p = build_paragraph(text)
        lp = LabeledParagraph(
            p, ["reflection"], [CitationSpan(0, 8, REFERENCE, [], continuation=True)]
        )
        fixed = repair_prediction(lp)
        assert fixed.spans == []
        assert validate(fixed) == []

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_decoded_random_tags_always_validate_after_repair(self, data):
        # Whatever tags a model emits, decode + repair must land on a valid
        # annotation; this is the structural guarantee the service relies on.
        text = "Kim (2019) and (Lee, 2020) study BERT. We extend Park (2021). Results differ."
        marks = [
            mark(text, "Kim (2019)", "b0"),
            mark(text, "(Lee, 2020)", "b1"),
            mark(text, "Park (2021)", "b2"),
        ]
        p = build_paragraph(text, marks)
        n = len(p.tokens)
        ct = data.draw(st.lists(st.sampled_from(CT_TAGS), min_size=n, max_size=n))
        cs = data.draw(st.lists(st.sampled_from(CS_TAGS), min_size=n, max_size=n))
        spans = from_bio(TagSequence(cs, ct), p)
        lp = LabeledParagraph(p, ["single_summ", "reflection", "other"], spans)
        fixed = repair_prediction(lp)
        assert validate(fixed) == []
