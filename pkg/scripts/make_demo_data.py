"""Emit a self-contained demo dataset exercising every CLI command.

Layout written under --out:

    records.jsonl        raw paper records for `rwkit ingest`
    dataset/train.jsonl  labeled paragraphs (pre-threshold years)
    dataset/test.jsonl   labeled paragraphs (held-out years)
    dataset/labeled.jsonl    pretags for `rwkit serve`
    dataset/paragraphs.jsonl unlabeled paragraphs for `rwkit tag/distant`
    dataset/intros.jsonl     citing-paper introductions for `rwkit genprep`
    dataset/bib.jsonl        cited-paper metadata for `rwkit genprep`
    dataset/docs.jsonl       cited-paper texts for `rwkit analyze --report retrieval`
    dataset/splits.json      train/test paper ids
"""

import argparse
import random
from pathlib import Path

from rwkit import dataio
from rwkit.ingest import make_splits, RelatedWorkSection
from rwkit.synth import SynthConfig, assign_cited_ids, make_s2orc_corpus


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="demo")
    parser.add_argument("--seed", type=int, default=13)
    parser.add_argument("--papers", type=int, default=24)
    parser.add_argument("--year-split", type=int, default=2019)
    args = parser.parse_args()

    config = SynthConfig(seed=args.seed, n_papers=args.papers)
    records, gold = make_s2orc_corpus(config)
    rng = random.Random(args.seed + 1)

    out = Path(args.out)
    dataset = out / "dataset"
    dataset.mkdir(parents=True, exist_ok=True)

    with open(out / "records.jsonl", "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(dataio.canonical_json(record) + "\n")

    labeled = [lp for pid in sorted(gold) for lp in gold[pid]]
    labeled, documents = assign_cited_ids(labeled, rng)
    years = {r["paper_id"]: r.get("year") for r in records}
    sections = [
        RelatedWorkSection(paper_id=pid, paragraphs=[], year=years.get(pid))
        for pid in sorted(gold)
    ]
    manifest = make_splits(sections, args.year_split)
    test_ids = set(manifest.test_ids)

    def dump(path: Path, rows: list[dict]) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for row in rows:
                fh.write(dataio.canonical_json(row) + "\n")

    train = [lp for lp in labeled if lp.paragraph.paper_id not in test_ids]
    test = [lp for lp in labeled if lp.paragraph.paper_id in test_ids]
    dump(dataset / "train.jsonl", [dataio.labeled_to_dict(lp) for lp in train])
    dump(dataset / "test.jsonl", [dataio.labeled_to_dict(lp) for lp in test])
    dump(dataset / "labeled.jsonl", [dataio.labeled_to_dict(lp) for lp in labeled])
    dump(
        dataset / "paragraphs.jsonl",
        [dataio.paragraph_to_dict(lp.paragraph) for lp in labeled],
    )
    dump(
        dataset / "intros.jsonl",
        [
            {"paper_id": pid, "intro": "We investigate citation modeling at scale."}
            for pid in sorted(gold)
        ],
    )
    dump(
        dataset / "docs.jsonl",
        [{"paper_id": cid, "text": text} for cid, text in sorted(documents.items())],
    )
    dump(
        dataset / "bib.jsonl",
        [
            {"paper_id": cid, "title": f"Cited paper {cid}", "abstract": text}
            for cid, text in sorted(documents.items())
        ],
    )
    (dataset / "splits.json").write_text(
        dataio.canonical_json(manifest.to_dict()) + "\n", encoding="utf-8"
    )
    print(
        dataio.canonical_json(
            {
                "out": str(out),
                "papers": len(records),
                "train": len(train),
                "test": len(test),
                "documents": len(documents),
            }
        )
    )


if __name__ == "__main__":
    main()
