"""Command-line entry points.

Dataset directories hold JSONL files of paragraph dicts: `train.jsonl` and
`test.jsonl` for labeled data, `paragraphs.jsonl` for unlabeled ones. Every
report is written as canonical JSON (sorted keys, no spaces).
"""

import argparse
import json
import sys
from pathlib import Path

from rwkit import analysis, dataio, generation, ingest, patterns, training
from rwkit.encoders import EncoderConfig
from rwkit.metrics import micro_f1
from rwkit.schema import LabeledParagraph, to_bio
from rwkit.tagger import LossWeights, TaggerModel


def _read_jsonl(path: Path) -> list[dict]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


def _labeled_file(path: str) -> Path:
    p = Path(path)
    if p.is_file():
        return p
    for name in ("labeled.jsonl", "tagged.jsonl", "train.jsonl", "test.jsonl"):
        if (p / name).exists():
            return p / name
    raise SystemExit(f"no labeled JSONL found under {p}")


def _paragraph_file(path: str) -> Path:
    p = Path(path)
    if p.is_file():
        return p
    for name in ("paragraphs.jsonl", "unlabeled.jsonl"):
        if (p / name).exists():
            return p / name
    raise SystemExit(f"no paragraph JSONL found under {p}")


def _load_labeled(path: str) -> list[LabeledParagraph]:
    return [dataio.labeled_from_dict(d) for d in _read_jsonl(_labeled_file(path))]


def _load_paragraphs(path: str):
    rows = _read_jsonl(_paragraph_file(path))
    out = []
    for d in rows:
        if "sentence_labels" in d:
            out.append(dataio.labeled_from_dict(d).paragraph)
        else:
            out.append(dataio.paragraph_from_dict(d))
    return out


def _write_report(report: dict, out: str | None) -> None:
    text = dataio.canonical_json(report)
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text + "\n", encoding="utf-8")
    print(text)


def _train_config(path: str | None) -> tuple[training.TrainConfig, EncoderConfig]:
    raw = json.loads(Path(path).read_text(encoding="utf-8")) if path else {}
    encoder = EncoderConfig(**raw.pop("encoder", {}))
    weights = LossWeights(**raw.pop("weights", {}))
    config = training.TrainConfig(weights=weights, **raw)
    return config, encoder


def cmd_ingest(args) -> None:
    records = _read_jsonl(Path(args.input))
    pats = ingest.DEFAULT_TITLE_PATTERNS
    if args.patterns:
        pats = tuple(
            line.strip()
            for line in Path(args.patterns).read_text(encoding="utf-8").splitlines()
            if line.strip()
        )
    sections, stats = ingest.ingest_corpus(records, pats)
    sections = ingest.prioritize_by_availability(sections)
    manifest = ingest.make_splits(sections, args.year_split)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "sections.jsonl", "w", encoding="utf-8") as fh:
        for s in sections:
            fh.write(dataio.canonical_json(ingest.section_to_dict(s)) + "\n")
    test_ids = set(manifest.test_ids)
    with open(out / "paragraphs.jsonl", "w", encoding="utf-8") as fh:
        for s in sections:
            if s.paper_id in test_ids:
                continue
            for p in s.paragraphs:
                fh.write(dataio.canonical_json(dataio.paragraph_to_dict(p)) + "\n")
    (out / "splits.json").write_text(
        dataio.canonical_json(manifest.to_dict()) + "\n", encoding="utf-8"
    )
    _write_report({"stats": stats, "sections": len(sections)}, None)


def cmd_train(args) -> None:
    config, encoder = _train_config(args.config)
    data = _load_labeled(str(Path(args.data) / "train.jsonl"))
    report: dict = {"examples": len(data)}
    if args.folds > 1:
        report["cross_validation"] = training.cross_validate(
            data, config, folds=args.folds, encoder_config=encoder
        )
    model = training.make_model(config, encoder)
    if not config.log_path and args.out:
        config.log_path = str(Path(args.out) / "train_log.jsonl")
    history = training.train(model, data, config)
    report["final_train"] = history[-1]["train"] if history else {}
    test_path = Path(args.data) / "test.jsonl"
    if test_path.exists():
        report["test"] = training.evaluate(model, _load_labeled(str(test_path)))
    if args.out:
        model.save(args.out)
    _write_report(report, args.report)


def cmd_tag(args) -> None:
    model = TaggerModel.load(args.model)
    paragraphs = _load_paragraphs(args.input)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "tagged.jsonl", "w", encoding="utf-8") as fh:
        for p in paragraphs:
            lp = model.predict(p)
            fh.write(dataio.canonical_json(dataio.labeled_to_dict(lp)) + "\n")
    _write_report({"tagged": len(paragraphs), "out": str(out / "tagged.jsonl")}, None)


def cmd_distant(args) -> None:
    meta = json.loads(
        (Path(args.model) / "config.json").read_text(encoding="utf-8")
    )
    encoder = EncoderConfig(**meta["encoder"])
    config, _ = _train_config(args.config)
    gold = _load_labeled(str(Path(args.data) / "train.jsonl"))
    unlabeled = _load_paragraphs(args.unlabeled)
    model, info = training.distant_supervision(
        gold, unlabeled, config, rounds=args.rounds, encoder_config=encoder
    )
    out = args.out or (str(Path(args.model)) + "-distant")
    model.save(out)
    report = {"info": info, "out": out}
    test_path = Path(args.data) / "test.jsonl"
    if test_path.exists():
        report["test"] = training.evaluate(model, _load_labeled(str(test_path)))
    _write_report(report, None)


def _aligned(pred: list[LabeledParagraph], gold: list[LabeledParagraph]):
    def key(lp):
        return (lp.paragraph.paper_id, lp.paragraph.index, lp.paragraph.text)

    gold_by_key = {key(lp): lp for lp in gold}
    pairs = []
    for lp in pred:
        if key(lp) not in gold_by_key:
            raise SystemExit(f"prediction {key(lp)[:2]} has no gold counterpart")
        pairs.append((lp, gold_by_key[key(lp)]))
    return pairs


def cmd_eval(args) -> None:
    pairs = _aligned(_load_labeled(args.pred), _load_labeled(args.gold))
    pred_seq, gold_seq = [], []
    for p, g in pairs:
        if args.task == "disc":
            pred_seq += p.sentence_labels
            gold_seq += g.sentence_labels
        else:
            tp, tg = to_bio(p), to_bio(g)
            pred_seq += tp.ct_tags if args.task == "ct" else tp.cs_tags
            gold_seq += tg.ct_tags if args.task == "ct" else tg.cs_tags
    ignore = frozenset() if args.task == "disc" else frozenset({"O"})
    score = micro_f1(gold_seq, pred_seq, ignore=ignore)
    _write_report(
        {"task": args.task, "micro_f1": score, "paragraphs": len(pairs)}, args.out
    )


def cmd_analyze(args) -> None:
    corpus = _load_labeled(args.data)
    if args.report == "cooccurrence":
        report = analysis.cooccurrence_stats(corpus).to_dict()
    elif args.report == "spans":
        report = {
            t: s.to_dict() for t, s in analysis.span_length_stats(corpus).items()
        }
    elif args.report == "style":
        report = analysis.style_profile(corpus).to_dict()
    elif args.report == "patterns":
        query = patterns.PatternQuery(
            min_support=args.min_support, max_gap=args.max_gap
        )
        report = {
            "patterns": [
                {"items": list(p.items), "support": p.support}
                for p in analysis.mine_label_patterns(corpus, query)
            ]
        }
    elif args.report == "retrieval":
        if not args.docs:
            raise SystemExit("--docs FILE is required for the retrieval report")
        docs = {d["paper_id"]: d["text"] for d in _read_jsonl(Path(args.docs))}
        report = analysis.retrieval_compare(corpus, docs).to_dict()
    elif args.report == "ratio":
        report = analysis.span_sentence_ratio(corpus)
    else:
        raise SystemExit(f"unknown report {args.report}")
    _write_report(report, args.out)


def cmd_genprep(args) -> None:
    corpus = _load_labeled(args.data)
    intros = {
        d["paper_id"]: d.get("intro", d.get("text", ""))
        for d in _read_jsonl(Path(args.intros))
    }
    bib = {}
    if args.bib:
        bib = {
            d["paper_id"]: {"title": d.get("title", ""), "abstract": d.get("abstract")}
            for d in _read_jsonl(Path(args.bib))
        }
    exclude = set()
    if args.exclude:
        exclude = set(json.loads(Path(args.exclude).read_text(encoding="utf-8"))["test_ids"])
    examples = generation.build_corpus(corpus, intros, bib, exclude)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(dataio.canonical_json(ex.to_dict()) + "\n")
    _write_report({"examples": len(examples), "out": args.out}, None)


def _load_examples(path: str) -> list[generation.GenerationExample]:
    return [generation.GenerationExample.from_dict(d) for d in _read_jsonl(Path(path))]


def cmd_genscore(args) -> None:
    examples = _load_examples(args.gold)
    predictions = {
        d["example_id"]: d.get("generated", "") for d in _read_jsonl(Path(args.pred))
    }
    _write_report(generation.evaluate_generation(predictions, examples), args.out)


def cmd_geneval_sheets(args) -> None:
    examples = _load_examples(args.gold)
    outputs = {}
    for spec_ in args.pred:
        name, _, path = spec_.partition("=")
        if not path:
            raise SystemExit(f"--pred wants NAME=FILE, got {spec_!r}")
        outputs[name] = {
            d["example_id"]: d.get("generated", "") for d in _read_jsonl(Path(path))
        }
    sheets, key = generation.sample_human_eval(
        outputs, examples, n=args.n, seed=args.seed
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "sheets.json").write_text(
        dataio.canonical_json(sheets) + "\n", encoding="utf-8"
    )
    (out / "key.json").write_text(dataio.canonical_json(key) + "\n", encoding="utf-8")
    _write_report({"instances": len(sheets), "out": str(out)}, None)


def cmd_serve(args) -> None:
    import uvicorn

    from rwkit.service import CorrectionStore, create_app, paragraph_key

    paragraphs = _load_paragraphs(args.data)
    pretagged = None
    labeled_path = Path(args.data) / "labeled.jsonl"
    if Path(args.data).is_dir() and labeled_path.exists():
        pretagged = {
            paragraph_key(lp.paragraph): lp
            for lp in _load_labeled(str(labeled_path))
        }
    model = TaggerModel.load(args.model) if args.model else None
    store = CorrectionStore.open(
        args.store or (str(Path(args.data)) + "-corrections"),
        paragraphs,
        pretagged=pretagged,
        model=model,
    )
    uvicorn.run(create_app(store), host=args.host, port=args.port)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rwkit", description="related-work annotation toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="extract related-work sections from records")
    p.add_argument("--input", required=True)
    p.add_argument("--patterns", help="file with one title regex per line")
    p.add_argument("--year-split", type=int, default=2019)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train", help="train the joint tagger")
    p.add_argument("--data", required=True)
    p.add_argument("--folds", type=int, default=1)
    p.add_argument("--config")
    p.add_argument("--out")
    p.add_argument("--report")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("tag", help="tag paragraphs with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tag)

    p = sub.add_parser("distant", help="retrain with model-tagged silver data")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--unlabeled", required=True)
    p.add_argument("--rounds", type=int, default=1)
    p.add_argument("--config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_distant)

    p = sub.add_parser("eval", help="score predictions against gold labels")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--task", choices=("disc", "ct", "cs"), required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("analyze", help="corpus statistics reports")
    p.add_argument("--data", required=True)
    p.add_argument(
        "--report",
        choices=("cooccurrence", "spans", "style", "patterns", "retrieval", "ratio"),
        required=True,
    )
    p.add_argument("--out")
    p.add_argument("--docs", help="paper_id/text JSONL for the retrieval report")
    p.add_argument("--min-support", type=float, default=0.05, dest="min_support")
    p.add_argument("--max-gap", type=int, default=0, dest="max_gap")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("genprep", help="build span-generation examples")
    p.add_argument("--data", required=True)
    p.add_argument("--intros", required=True)
    p.add_argument("--bib")
    p.add_argument("--exclude", help="splits.json whose test_ids to exclude")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_genprep)

    p = sub.add_parser("genscore", help="score generated spans")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_genscore)

    p = sub.add_parser("geneval-sheets", help="blind human-rating sheets")
    p.add_argument("--pred", action="append", required=True, help="NAME=FILE")
    p.add_argument("--gold", required=True)
    p.add_argument("--n", type=int, default=15)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_geneval_sheets)

    p = sub.add_parser("serve", help="run the correction service")
    p.add_argument("--data", required=True)
    p.add_argument("--model")
    p.add_argument("--store")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8020)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
