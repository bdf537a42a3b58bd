"""Ingest structured paper records and extract related-work sections.

Input is line-delimited JSON, one paper per line, S2ORC-style:

    {"paper_id": "42", "title": ..., "abstract": ..., "year": 2019,
     "body_text": [{"section": "Related Work", "text": "...",
                    "cite_spans": [{"start": 0, "end": 18, "ref_id": "BIBREF0"}]}],
     "bib_entries": {"BIBREF0": {"title": ..., "year": 2015, "link": "1234"}}}

`cite_spans` offsets are paragraph-local, 0-based, half-open. `link` is the
cited paper's id when the paper is available, else null/missing. Spans with a
null `ref_id` are not citations to the bibliography and are dropped.
"""

import logging
import re
from dataclasses import dataclass, field, replace

from rwkit import dataio
from rwkit.schema import CitationMark, Paragraph, build_paragraph

logger = logging.getLogger(__name__)

DEFAULT_TITLE_PATTERNS = (
    r"related works?",
    r"prior work",
    r"literature review",
    r"background and related work",
)

# Leading section numbering: arabic (possibly dotted) or roman numerals with
# separators, repeated ("2.", "II.", "2.1.").
_NUMBERING = re.compile(
    r"^\s*(?:(?:\d+(?:\.\d+)*|[ivxlcm]+)[.):\-]*\s+)+", re.IGNORECASE
)


class IngestError(ValueError):
    pass


@dataclass
class BibEntry:
    title: str = ""
    year: int | None = None
    cited_paper_id: str | None = None


@dataclass
class BodySection:
    title: str
    paragraphs: list[Paragraph]


@dataclass
class PaperRecord:
    paper_id: str
    title: str = ""
    abstract: str = ""
    year: int | None = None
    body_sections: list[BodySection] = field(default_factory=list)
    bibliography: dict[str, BibEntry] = field(default_factory=dict)


@dataclass
class RelatedWorkSection:
    paper_id: str
    paragraphs: list[Paragraph]
    year: int | None = None
    availability: float | None = None


@dataclass
class SplitManifest:
    train_ids: list[str]
    test_ids: list[str]
    year_threshold: int

    def to_dict(self) -> dict:
        return {
            "train_ids": sorted(self.train_ids),
            "test_ids": sorted(self.test_ids),
            "year_threshold": self.year_threshold,
        }


def parse_record(raw: dict) -> PaperRecord:
    """Build a PaperRecord from one S2ORC-style JSON object.

    Structural problems raise IngestError naming the offending field.
    """
    if "paper_id" not in raw:
        raise IngestError("paper_id: missing")
    paper_id = str(raw["paper_id"])

    bibliography = {}
    for key, entry in (raw.get("bib_entries") or {}).items():
        if not isinstance(entry, dict):
            raise IngestError(f"bib_entries[{key}]: not an object")
        year = entry.get("year")
        bibliography[key] = BibEntry(
            title=entry.get("title") or "",
            year=int(year) if year is not None else None,
            cited_paper_id=_cited_id(entry),
        )

    sections: list[BodySection] = []
    for i, block in enumerate(raw.get("body_text") or []):
        title = block.get("section") or ""
        text = block.get("text")
        if text is None:
            raise IngestError(f"body_text[{i}].text: missing")
        marks = []
        for j, span in enumerate(block.get("cite_spans") or []):
            ref = span.get("ref_id")
            if ref is None:
                continue
            try:
                start, end = int(span["start"]), int(span["end"])
            except (KeyError, TypeError, ValueError) as exc:
                raise IngestError(f"body_text[{i}].cite_spans[{j}]: bad offsets") from exc
            if not (0 <= start < end <= len(text)):
                raise IngestError(
                    f"body_text[{i}].cite_spans[{j}]: offsets ({start},{end}) "
                    f"outside paragraph of length {len(text)}"
                )
            if ref not in bibliography:
                raise IngestError(
                    f"body_text[{i}].cite_spans[{j}].ref_id: dangling bib key {ref!r}"
                )
            marks.append(CitationMark(start, end, ref))
        paragraph = Paragraph(text=text, citation_marks=marks, paper_id=paper_id)
        if sections and sections[-1].title == title:
            sections[-1].paragraphs.append(paragraph)
        else:
            sections.append(BodySection(title=title, paragraphs=[paragraph]))

    year = raw.get("year")
    return PaperRecord(
        paper_id=paper_id,
        title=raw.get("title") or "",
        abstract=raw.get("abstract") or "",
        year=int(year) if year is not None else None,
        body_sections=sections,
        bibliography=bibliography,
    )


def _cited_id(entry: dict) -> str | None:
    for key in ("link", "paper_id", "cited_paper_id"):
        if entry.get(key):
            return str(entry[key])
    return None


def normalize_title(title: str) -> str:
    title = _NUMBERING.sub("", title)
    title = re.sub(r"\s+", " ", title).strip().strip(".:").strip()
    return title.lower()


def extract_related_work(
    record: PaperRecord, title_patterns: tuple[str, ...] = DEFAULT_TITLE_PATTERNS
) -> RelatedWorkSection | None:
    """Return the first section whose normalized title matches a pattern.

    Only the first match in document order is taken; papers that split their
    literature review across several sections keep only the first one.
    """
    compiled = [re.compile(p, re.IGNORECASE) for p in title_patterns]
    for section in record.body_sections:
        normalized = normalize_title(section.title)
        if any(p.fullmatch(normalized) for p in compiled):
            paragraphs = [
                replace(p, index=i) for i, p in enumerate(section.paragraphs)
            ]
            return RelatedWorkSection(
                paper_id=record.paper_id, paragraphs=paragraphs, year=record.year
            )
    return None


def segment_and_tokenize(section: RelatedWorkSection) -> RelatedWorkSection:
    """Fill sentence and token offsets, snapping citation marks to tokens.

    Recomputes everything from the raw text, so the operation is
    deterministic and idempotent. Empty paragraphs are dropped with a
    warning; a section with no text at all is an error.
    """
    paragraphs = []
    for p in section.paragraphs:
        if not p.text.strip():
            logger.warning(
                "skipping empty paragraph %s of section %s", p.index, section.paper_id
            )
            continue
        paragraphs.append(
            build_paragraph(
                p.text, p.citation_marks, paper_id=p.paper_id, index=p.index
            )
        )
    if not paragraphs:
        raise IngestError(f"section {section.paper_id}: no non-empty paragraphs")
    return replace(section, paragraphs=paragraphs)


def link_citations(
    section: RelatedWorkSection, bibliography: dict[str, BibEntry]
) -> RelatedWorkSection:
    """Resolve each mark's bib key to a cited paper id where available.

    Dangling keys and entries without an id leave the mark unresolved; the
    per-section availability ratio is resolved marks over all marks.
    """
    total = resolved = 0
    paragraphs = []
    for p in section.paragraphs:
        marks = []
        for m in p.citation_marks:
            entry = bibliography.get(m.bib_key)
            cited = entry.cited_paper_id if entry else None
            total += 1
            resolved += cited is not None
            marks.append(replace(m, cited_paper_id=cited))
        paragraphs.append(replace(p, citation_marks=marks))
    availability = resolved / total if total else 0.0
    return replace(section, paragraphs=paragraphs, availability=availability)


def prioritize_by_availability(
    sections: list[RelatedWorkSection],
) -> list[RelatedWorkSection]:
    """Order sections for annotation, most-resolvable citations first."""
    return sorted(
        sections, key=lambda s: (-(s.availability or 0.0), s.paper_id)
    )


def make_splits(sections: list[RelatedWorkSection], year_threshold: int) -> SplitManifest:
    """Year-based split: papers from `year_threshold` on are the test set."""
    train, test = [], []
    for s in sections:
        if s.year is None:
            logger.warning("section %s has no year; assigning to train", s.paper_id)
            train.append(s.paper_id)
        elif s.year >= year_threshold:
            test.append(s.paper_id)
        else:
            train.append(s.paper_id)
    if not test:
        logger.warning("no sections at or after %d; test split is empty", year_threshold)
    return SplitManifest(train_ids=train, test_ids=test, year_threshold=year_threshold)


def section_to_dict(section: RelatedWorkSection) -> dict:
    return {
        "paper_id": section.paper_id,
        "year": section.year,
        "availability": section.availability,
        "paragraphs": [dataio.paragraph_to_dict(p) for p in section.paragraphs],
    }


def section_from_dict(d: dict) -> RelatedWorkSection:
    return RelatedWorkSection(
        paper_id=d["paper_id"],
        paragraphs=[dataio.paragraph_from_dict(p) for p in d["paragraphs"]],
        year=d.get("year"),
        availability=d.get("availability"),
    )


def ingest_corpus(
    records: list[dict],
    title_patterns: tuple[str, ...] = DEFAULT_TITLE_PATTERNS,
) -> tuple[list[RelatedWorkSection], dict]:
    """Run extract, segment, and link over raw records; skip bad ones loudly."""
    sections = []
    stats = {"records": 0, "extracted": 0, "errors": 0}
    for raw in records:
        stats["records"] += 1
        try:
            record = parse_record(raw)
            section = extract_related_work(record, title_patterns)
            if section is None:
                continue
            section = segment_and_tokenize(section)
            section = link_citations(section, record.bibliography)
            sections.append(section)
            stats["extracted"] += 1
        except IngestError as exc:
            logger.warning("skipping record: %s", exc)
            stats["errors"] += 1
    return sections, stats
