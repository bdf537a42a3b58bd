"""Labeled-data JSON interchange and dataset loading.

One canonical serialization is used everywhere (export files, HTTP payloads):
UTF-8, keys sorted, compact separators, no ASCII escaping. Byte-identical
output for equal inputs is a contract the annotation service's export
idempotence and the review UI's round-trip test both rely on.
"""

import json
from pathlib import Path
from typing import Any, Iterable, Iterator

from rwkit.schema import (
    Citation,
    CitationMark,
    CitationSpan,
    LabeledParagraph,
    Paragraph,
)


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def paragraph_to_dict(p: Paragraph) -> dict:
    return {
        "text": p.text,
        "sentences": [list(b) for b in p.sentences],
        "tokens": [list(b) for b in p.tokens],
        "citation_marks": [
            {
                "start": m.start,
                "end": m.end,
                "bib_key": m.bib_key,
                "cited_paper_id": m.cited_paper_id,
            }
            for m in p.citation_marks
        ],
        "paper_id": p.paper_id,
        "index": p.index,
    }


def paragraph_from_dict(d: dict) -> Paragraph:
    return Paragraph(
        text=d["text"],
        sentences=[tuple(b) for b in d["sentences"]],
        tokens=[tuple(b) for b in d["tokens"]],
        citation_marks=[
            CitationMark(m["start"], m["end"], m["bib_key"], m.get("cited_paper_id"))
            for m in d["citation_marks"]
        ],
        paper_id=d.get("paper_id"),
        index=d.get("index"),
    )


def labeled_to_dict(lp: LabeledParagraph) -> dict:
    d = paragraph_to_dict(lp.paragraph)
    d["sentence_labels"] = list(lp.sentence_labels)
    d["spans"] = [
        {
            "start": s.start,
            "end": s.end,
            "type": s.span_type,
            "continuation": s.continuation,
            "citations": [
                {
                    "start": c.start,
                    "end": c.end,
                    "bib_key": c.bib_key,
                    "type": c.span_type,
                    "cited_paper_id": c.cited_paper_id,
                }
                for c in s.citations
            ],
        }
        for s in lp.spans
    ]
    if lp.pretag_unavailable:
        d["pretag_unavailable"] = True
    return d


def labeled_from_dict(d: dict) -> LabeledParagraph:
    return LabeledParagraph(
        paragraph=paragraph_from_dict(d),
        sentence_labels=list(d["sentence_labels"]),
        spans=[
            CitationSpan(
                start=s["start"],
                end=s["end"],
                span_type=s["type"],
                continuation=s.get("continuation", False),
                citations=[
                    Citation(
                        c["start"],
                        c["end"],
                        c["bib_key"],
                        c["type"],
                        c.get("cited_paper_id"),
                    )
                    for c in s["citations"]
                ],
            )
            for s in d["spans"]
        ],
        pretag_unavailable=d.get("pretag_unavailable", False),
    )


def write_jsonl(path: str | Path, records: Iterable[dict]) -> int:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = 0
    with path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(canonical_json(rec) + "\n")
            n += 1
    return n


def read_jsonl(path: str | Path) -> Iterator[dict]:
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)


def save_labeled(path: str | Path, dataset: Iterable[LabeledParagraph]) -> int:
    return write_jsonl(path, (labeled_to_dict(lp) for lp in dataset))


def load_labeled(path: str | Path) -> list[LabeledParagraph]:
    return [labeled_from_dict(d) for d in read_jsonl(path)]
