"""Evaluation metrics: micro-F1, Cohen's kappa, Kendall's tau, ROUGE recall.

All metrics are implemented directly so their exact definitions are pinned
down in one place; the test suite cross-checks them against independent
implementations.
"""

import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence


def micro_f1(
    gold: Sequence, pred: Sequence, ignore: frozenset = frozenset()
) -> float:
    """Micro-averaged F1 over parallel label sequences.

    Labels in `ignore` never count as true positives or false negatives,
    and predicting one is never a false positive; predicting a real label
    where gold is ignored still costs a false positive.
    """
    if len(gold) != len(pred):
        raise ValueError(f"length mismatch: {len(gold)} vs {len(pred)}")
    tp = fp = fn = 0
    for g, p in zip(gold, pred):
        if g == p:
            tp += g not in ignore
            continue
        fp += p not in ignore
        fn += g not in ignore
    denom = 2 * tp + fp + fn
    return 2 * tp / denom if denom else 0.0


def cohens_kappa(a: Sequence, b: Sequence) -> float:
    """Chance-corrected agreement between two annotators' label sequences.

    With degenerate expected agreement of 1 the statistic is undefined; we
    return 1.0 on perfect agreement and 0.0 otherwise.
    """
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    if not a:
        raise ValueError("empty sequences")
    n = len(a)
    p_o = sum(x == y for x, y in zip(a, b)) / n
    counts_a, counts_b = Counter(a), Counter(b)
    p_e = sum(
        (counts_a[label] / n) * (counts_b[label] / n)
        for label in set(counts_a) | set(counts_b)
    )
    if p_e == 1.0:
        return 1.0 if p_o == 1.0 else 0.0
    return (p_o - p_e) / (1.0 - p_e)


def kendalls_tau(a: Sequence[float], b: Sequence[float]) -> float:
    """Tau-b rank correlation with tie correction.

    Degenerate inputs (fewer than two items, or a constant sequence) have no
    defined rank correlation; we return 0.0.
    """
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    n = len(a)
    if n < 2:
        return 0.0
    concordant = discordant = ties_a = ties_b = 0
    for i in range(n):
        for j in range(i + 1, n):
            da, db = a[i] - a[j], b[i] - b[j]
            if da == 0 and db == 0:
                ties_a += 1
                ties_b += 1
            elif da == 0:
                ties_a += 1
            elif db == 0:
                ties_b += 1
            elif (da > 0) == (db > 0):
                concordant += 1
            else:
                discordant += 1
    pairs = n * (n - 1) // 2
    denom = ((pairs - ties_a) * (pairs - ties_b)) ** 0.5
    if denom == 0:
        return 0.0
    return (concordant - discordant) / denom


_WORD = re.compile(r"\w+")


def rouge_tokens(text: str) -> list[str]:
    return _WORD.findall(text.lower())


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _ngram_recall(cand: list[str], ref: list[str], n: int) -> float:
    ref_counts = _ngrams(ref, n)
    total = sum(ref_counts.values())
    if total == 0:
        return 0.0
    cand_counts = _ngrams(cand, n)
    hit = sum(min(count, cand_counts[g]) for g, count in ref_counts.items())
    return hit / total


def _lcs_length(a: list[str], b: list[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        row = [0]
        for j, y in enumerate(b, 1):
            row.append(prev[j - 1] + 1 if x == y else max(row[-1], prev[j]))
        prev = row
    return prev[-1]


@dataclass
class RougeScore:
    r1: float
    r2: float
    rl: float

    @property
    def r12_avg(self) -> float:
        return (self.r1 + self.r2) / 2.0

    def to_dict(self) -> dict:
        return {"r1": self.r1, "r2": self.r2, "rl": self.rl}


def rouge_scores(candidate: str, reference: str) -> RougeScore:
    """Recall-oriented ROUGE-1/2/L of the candidate against one reference.

    Texts are lowercased and split on word characters; an empty reference
    scores zero everywhere.
    """
    cand, ref = rouge_tokens(candidate), rouge_tokens(reference)
    rl = _lcs_length(cand, ref) / len(ref) if ref else 0.0
    return RougeScore(
        r1=_ngram_recall(cand, ref, 1),
        r2=_ngram_recall(cand, ref, 2),
        rl=rl,
    )


def mean(values: Iterable[float]) -> float:
    values = list(values)
    if not values:
        raise ValueError("mean of empty sequence")
    return sum(values) / len(values)
