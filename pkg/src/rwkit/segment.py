"""Deterministic, rule-based sentence segmentation and tokenization.

All offsets are 0-based, half-open, over unicode code points. Sentence
offsets tile the paragraph text exactly (inter-sentence whitespace is
attached to the preceding sentence), so concatenating the sentence
substrings reproduces the text byte for byte. Tokens are computed per
sentence, which guarantees that no token straddles a sentence boundary.
"""

import re

# Trailing strings that block a sentence split at the following period.
# Matched case-insensitively against the text ending at the punctuation mark.
ABBREVIATIONS = (
    "et al.",
    "e.g.",
    "i.e.",
    "fig.",
    "figs.",
    "eq.",
    "eqs.",
    "cf.",
    "vs.",
    "etc.",
    "resp.",
    "w.r.t.",
    "sec.",
    "tab.",
    "no.",
    "vol.",
    "pp.",
)

# Sentence terminator: one or more of .!? optionally followed by closing
# quotes/brackets, then whitespace. The split lands at the start of the
# next sentence.
_BOUNDARY = re.compile(r"[.!?]+[\)\]\"']*(\s+)")

_TOKEN = re.compile(r"\w+|[^\w\s]", re.UNICODE)


def _blocked_by_abbreviation(text: str, punct_end: int) -> bool:
    """True if the text ending at punct_end ends with a known abbreviation."""
    head = text[:punct_end].lower()
    return any(head.endswith(abbr) for abbr in ABBREVIATIONS)


def split_sentences(text: str) -> list[tuple[int, int]]:
    """Split text into sentence offsets that tile the full string.

    A boundary requires terminal punctuation, whitespace, and an upper-case
    letter or digit opening the next sentence; the abbreviation list vetoes
    otherwise-valid boundaries.
    """
    if not text:
        return []
    starts = [0]
    for m in _BOUNDARY.finditer(text):
        nxt = m.end()
        if nxt >= len(text):
            continue
        ch = text[nxt]
        if not (ch.isupper() or ch.isdigit()):
            continue
        punct_end = m.start(1)  # position just past the punctuation run
        if _blocked_by_abbreviation(text, punct_end):
            continue
        starts.append(nxt)
    bounds = []
    for i, s in enumerate(starts):
        e = starts[i + 1] if i + 1 < len(starts) else len(text)
        bounds.append((s, e))
    return bounds


def tokenize(text: str, sentences: list[tuple[int, int]] | None = None) -> list[tuple[int, int]]:
    """Tokenize text into word/punctuation offsets, one sentence at a time."""
    if sentences is None:
        sentences = split_sentences(text)
    tokens = []
    for s, e in sentences:
        for m in _TOKEN.finditer(text, s, e):
            tokens.append((m.start(), m.end()))
    return tokens


def snap_to_tokens(start: int, end: int, tokens: list[tuple[int, int]]) -> tuple[int, int]:
    """Snap a character range to token boundaries.

    An offset strictly inside a token is widened to that token's edge; an
    offset stranded in whitespace is tightened inward to the nearest token
    edge, trimming stray spaces around the range. A range covering no token
    comes back unchanged.
    """
    for ts, te in tokens:
        if ts < start < te:
            start = ts
        if ts < end < te:
            end = te
    starts = [ts for ts, _ in tokens]
    ends = [te for _, te in tokens]
    if start not in starts:
        nxt = [ts for ts in starts if ts > start]
        if nxt and nxt[0] < end:
            start = nxt[0]
    if end not in ends:
        prev = [te for te in ends if te < end]
        if prev and prev[-1] > start:
            end = prev[-1]
    return start, end
