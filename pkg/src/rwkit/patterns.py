"""Gap-constrained frequent subsequence mining over label sequences.

A pattern occurs in a sequence when its items appear in order with at most
`max_gap` skipped positions between consecutive matches; support counts each
sequence at most once. Mining grows patterns by prefix extension, which keeps
the apriori property: every occurrence of a pattern is an occurrence of each
of its contiguous sub-patterns.
"""

import math
from dataclasses import dataclass
from typing import Hashable, Sequence


@dataclass
class PatternQuery:
    # A float in (0, 1) is a fraction of the sequence count; an int is an
    # absolute sequence count.
    min_support: float | int = 0.05
    max_gap: int = 0
    min_len: int = 2
    max_len: int = 4
    closed: bool = True


@dataclass(frozen=True)
class Pattern:
    items: tuple
    support: int


def resolve_min_count(min_support: float | int, n_sequences: int) -> int:
    if isinstance(min_support, float) and 0 < min_support < 1:
        return max(1, math.ceil(min_support * n_sequences))
    return max(1, int(min_support))


def pattern_occurs(
    sequence: Sequence[Hashable], items: Sequence[Hashable], max_gap: int
) -> bool:
    """Left-to-right check tracking every feasible match position.

    Greedy earliest-match extension is not exact here: committing to an early
    match can close the window on a later item that a later match would have
    kept open, so the whole frontier of end positions is carried along.
    """
    if not items:
        return True
    positions = {i for i, x in enumerate(sequence) if x == items[0]}
    if not positions:
        return False
    for item in items[1:]:
        nxt = set()
        for p in positions:
            for j in range(p + 1, min(p + max_gap + 2, len(sequence))):
                if sequence[j] == item:
                    nxt.add(j)
        positions = nxt
        if not positions:
            return False
    return True


def _is_subsequence(small: tuple, big: tuple) -> bool:
    it = iter(big)
    return all(item in it for item in small)


def mine_patterns(
    sequences: Sequence[Sequence[Hashable]], query: PatternQuery | None = None
) -> list[Pattern]:
    query = query or PatternQuery()
    seqs = [list(s) for s in sequences]
    if not seqs:
        return []
    min_count = resolve_min_count(query.min_support, len(seqs))

    # Pattern -> {sequence index -> sorted end positions of matches}.
    frontier: dict[tuple, dict[int, list[int]]] = {}
    starts: dict[tuple, dict[int, set[int]]] = {}
    for si, s in enumerate(seqs):
        for pos, item in enumerate(s):
            starts.setdefault((item,), {}).setdefault(si, set()).add(pos)
    for pattern, occ in starts.items():
        if len(occ) >= min_count:
            frontier[pattern] = {si: sorted(ps) for si, ps in occ.items()}

    frequent = dict(frontier)
    while frontier:
        grown: dict[tuple, dict[int, set[int]]] = {}
        for pattern, occ in frontier.items():
            if len(pattern) >= query.max_len:
                continue
            for si, ends in occ.items():
                s = seqs[si]
                for e in ends:
                    for p in range(e + 1, min(e + query.max_gap + 2, len(s))):
                        grown.setdefault(pattern + (s[p],), {}).setdefault(
                            si, set()
                        ).add(p)
        frontier = {
            pattern: {si: sorted(ps) for si, ps in occ.items()}
            for pattern, occ in grown.items()
            if len(occ) >= min_count
        }
        frequent.update(frontier)

    patterns = [
        Pattern(items, len(occ))
        for items, occ in frequent.items()
        if len(items) >= query.min_len
    ]
    if query.closed:
        patterns = [
            p
            for p in patterns
            if not any(
                q.support == p.support
                and len(q.items) > len(p.items)
                and _is_subsequence(p.items, q.items)
                for q in patterns
            )
        ]
    patterns.sort(key=lambda p: (-p.support, -len(p.items), p.items))
    return patterns
