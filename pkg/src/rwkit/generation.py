"""Harness for citation-span generation experiments.

Each example asks a text-to-text model to write one citation span back into
its related-work paragraph: the input is the citing paper's introduction, the
paragraph with the target span replaced by a placeholder, and one block per
cited paper (citation mark, type marker, title, abstract). Evaluation strips
citation marks from both sides before ROUGE so surface forms of author names
do not inflate scores.
"""

import random
import re
from dataclasses import dataclass, field

from rwkit.metrics import RougeScore, rouge_scores
from rwkit.schema import DOMINANT, LabeledParagraph

PLACEHOLDER = "[TARGET_SPAN]"
SEP = "</s>"
NO_ABSTRACT = "[NO_ABSTRACT]"

HUMAN_EVAL_ASPECTS = ("fluency", "relevance", "coherence", "overall")
HUMAN_EVAL_SCALE = (1, 5)

_BRACKET_MARK = re.compile(r"\[\d+(?:\s*[,;]\s*\d+)*\]")
_PAREN_MARK = re.compile(r"\((?:[^()]*\b(?:19|20)\d{2}[a-z]?\b[^()]*)\)")


class GenerationError(ValueError):
    pass


def strip_citation_marks(text: str) -> str:
    """Remove bracketed-numeric and parenthesized name-year citation marks.

    Narrative author names outside parentheses stay: they are prose. The
    operation is idempotent.
    """
    text = _BRACKET_MARK.sub(" ", text)
    text = _PAREN_MARK.sub(" ", text)
    text = re.sub(r"\s+([.,;:!?])", r"\1", text)
    return " ".join(text.split())


def _normalize(text: str) -> str:
    return " ".join(strip_citation_marks(text).lower().split())


@dataclass
class CitationBlock:
    mark: str
    citation_type: str
    title: str
    abstract: str | None = None

    def render(self) -> str:
        marker = "[DOMINANT]" if self.citation_type == DOMINANT else "[REFERENCE]"
        abstract = self.abstract if self.abstract else NO_ABSTRACT
        return f"{marker} {self.mark} {self.title} {abstract}"

    def to_dict(self) -> dict:
        return {
            "mark": self.mark,
            "citation_type": self.citation_type,
            "title": self.title,
            "abstract": self.abstract,
        }


@dataclass
class GenerationExample:
    example_id: str
    span_type: str
    target: str
    intro: str
    masked_context: str
    blocks: list[CitationBlock] = field(default_factory=list)
    empty_target: bool = False

    def render(self, token_budget: int | None = None) -> str:
        """Assemble the model input. Over budget, cited-paper blocks are
        dropped from the last one backwards; the intro is trimmed from its
        end only if that is still not enough. The masked context always
        survives whole.
        """
        blocks = list(self.blocks)
        intro_words = self.intro.split()

        def assemble(intro: list[str], blocks: list[CitationBlock]) -> str:
            parts = [" ".join(intro), self.masked_context]
            parts += [b.render() for b in blocks]
            return f" {SEP} ".join(parts)

        text = assemble(intro_words, blocks)
        if token_budget is None:
            return text
        while blocks and len(text.split()) > token_budget:
            blocks.pop()
            text = assemble(intro_words, blocks)
        while intro_words and len(text.split()) > token_budget:
            overshoot = len(text.split()) - token_budget
            intro_words = intro_words[: max(0, len(intro_words) - overshoot)]
            text = assemble(intro_words, blocks)
        return text

    def to_dict(self) -> dict:
        return {
            "example_id": self.example_id,
            "span_type": self.span_type,
            "target": self.target,
            "intro": self.intro,
            "masked_context": self.masked_context,
            "blocks": [b.to_dict() for b in self.blocks],
            "empty_target": self.empty_target,
        }

    @staticmethod
    def from_dict(d: dict) -> "GenerationExample":
        return GenerationExample(
            example_id=d["example_id"],
            span_type=d["span_type"],
            target=d["target"],
            intro=d["intro"],
            masked_context=d["masked_context"],
            blocks=[CitationBlock(**b) for b in d.get("blocks", [])],
            empty_target=d.get("empty_target", False),
        )


def build_example(
    lp: LabeledParagraph,
    span_index: int,
    intro: str,
    bibliography: dict[str, dict] | None = None,
) -> GenerationExample:
    """One example per target span. `bibliography` maps a citation's cited
    paper id to {"title", "abstract"}; unresolved citations get a block with
    the mark alone.
    """
    span = lp.spans[span_index]
    text = lp.paragraph.text
    target = text[span.start : span.end]
    masked = " ".join((text[: span.start] + PLACEHOLDER + text[span.end :]).split())

    blocks = []
    bibliography = bibliography or {}
    for c in span.citations:
        entry = bibliography.get(c.cited_paper_id) if c.cited_paper_id else None
        blocks.append(
            CitationBlock(
                mark=text[c.start : c.end],
                citation_type=c.span_type,
                title=(entry or {}).get("title", ""),
                abstract=(entry or {}).get("abstract"),
            )
        )
    pid = lp.paragraph.paper_id or "?"
    example = GenerationExample(
        example_id=f"{pid}/{lp.paragraph.index}/{span_index}",
        span_type=span.span_type,
        target=target,
        intro=" ".join(intro.split()),
        masked_context=masked,
        blocks=blocks,
        empty_target=not _normalize(target),
    )
    # Leak check covers the intro and the masked context. Cited-paper blocks
    # are exempt: they must carry the citation mark, and overlap with their
    # titles or abstracts is content the model is supposed to use. The probe
    # is the span text minus its exact mark ranges, so recurring author names
    # in narrative marks do not trip it; probes under three words are too
    # generic to test.
    content, pos = [], span.start
    for c in sorted(span.citations, key=lambda c: c.start):
        content.append(text[pos : c.start])
        pos = c.end
    content.append(text[pos : span.end])
    leak = _normalize("".join(content))
    if len(leak.split()) >= 3 and leak in _normalize(
        f"{example.intro} {example.masked_context}"
    ):
        raise GenerationError(
            f"target span of {example.example_id} leaks into the model input"
        )
    return example


def build_corpus(
    corpus: list[LabeledParagraph],
    intros: dict[str, str],
    bibliography: dict[str, dict] | None = None,
    exclude_paper_ids: set[str] | None = None,
) -> list[GenerationExample]:
    exclude = exclude_paper_ids or set()
    out = []
    for lp in corpus:
        pid = lp.paragraph.paper_id
        if pid in exclude:
            continue
        intro = intros.get(pid or "", "")
        for k in range(len(lp.spans)):
            out.append(build_example(lp, k, intro, bibliography))
    return out


def generate_span(model, example: GenerationExample, token_budget: int | None = None) -> str:
    """Run any text-in text-out callable on the rendered input."""
    return model(example.render(token_budget))


class MemorizingModel:
    """Maps each seen input back to its target; a harness round-trip probe."""

    def __init__(self) -> None:
        self.memory: dict[str, str] = {}

    def fit(self, examples: list[GenerationExample], token_budget: int | None = None):
        for ex in examples:
            self.memory[ex.render(token_budget)] = ex.target
        return self

    def __call__(self, text: str) -> str:
        return self.memory.get(text, "")


def evaluate_generation(
    predictions: dict[str, str], examples: list[GenerationExample]
) -> dict:
    """Mark-stripped ROUGE against gold spans, split by span type.

    Examples whose gold is empty after mark stripping cannot be scored and
    are only counted.
    """
    by_type: dict[str, list[RougeScore]] = {}
    skipped = 0
    for ex in examples:
        gold = strip_citation_marks(ex.target)
        if not gold.strip():
            skipped += 1
            continue
        candidate = strip_citation_marks(predictions.get(ex.example_id, ""))
        by_type.setdefault(ex.span_type, []).append(rouge_scores(candidate, gold))
    report: dict = {"skipped_empty_gold": skipped, "by_type": {}}
    for span_type, scores in sorted(by_type.items()):
        n = len(scores)
        report["by_type"][span_type] = {
            "n": n,
            "r1": sum(s.r1 for s in scores) / n,
            "r2": sum(s.r2 for s in scores) / n,
            "rl": sum(s.rl for s in scores) / n,
        }
    return report


def sample_human_eval(
    outputs: dict[str, dict[str, str]],
    examples: list[GenerationExample],
    n: int = 15,
    seed: int = 0,
) -> tuple[list[dict], list[dict]]:
    """Blind rating sheets: `n` instances per span type, system order
    shuffled per instance. Returns (sheets, key); the key maps each blind
    position back to its system and stays out of the sheets.

    `outputs` maps system name to {example_id: generated text}. Raters score
    the aspects in HUMAN_EVAL_ASPECTS on the 1 to 5 scale.
    """
    rng = random.Random(seed)
    systems = sorted(outputs)
    sheets, key = [], []
    by_type: dict[str, list[GenerationExample]] = {}
    for ex in examples:
        if ex.empty_target:
            continue
        if all(ex.example_id in outputs[s] for s in systems):
            by_type.setdefault(ex.span_type, []).append(ex)
    for span_type in sorted(by_type):
        pool = by_type[span_type]
        if len(pool) < n:
            raise GenerationError(
                f"need {n} rateable {span_type} instances, have {len(pool)}"
            )
        for ex in rng.sample(pool, n):
            order = systems[:]
            rng.shuffle(order)
            sheets.append(
                {
                    "example_id": ex.example_id,
                    "span_type": span_type,
                    "context": ex.masked_context,
                    "candidates": [outputs[s][ex.example_id] for s in order],
                    "aspects": list(HUMAN_EVAL_ASPECTS),
                    "scale": list(HUMAN_EVAL_SCALE),
                }
            )
            key.append({"example_id": ex.example_id, "systems": order})
    return sheets, key


def staging_groups(lp: LabeledParagraph) -> dict:
    """Units for staged generation: each span alone, maximal runs of spans
    in consecutive sentences as blocks, then the whole paragraph.
    """
    from rwkit.analysis import sentence_index_of_offset

    para = lp.paragraph
    spans = [
        {
            "start": s.start,
            "end": s.end,
            "type": s.span_type,
            "sentence": sentence_index_of_offset(para, s.start),
        }
        for s in lp.spans
    ]
    blocks = []
    for k, span in enumerate(spans):
        if blocks and span["sentence"] - blocks[-1]["sentences"][-1] <= 1:
            blocks[-1]["span_indices"].append(k)
            blocks[-1]["sentences"].append(span["sentence"])
            blocks[-1]["end"] = max(blocks[-1]["end"], span["end"])
        else:
            blocks.append(
                {
                    "span_indices": [k],
                    "sentences": [span["sentence"]],
                    "start": span["start"],
                    "end": span["end"],
                }
            )
    return {
        "spans": spans,
        "blocks": blocks,
        "paragraph": {"start": 0, "end": len(para.text)},
    }
