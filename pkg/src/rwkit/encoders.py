"""Token encoders feeding the joint tagger.

The default encoder is a frozen, hash-seeded embedding with sentence-local
context mixing. It exists so the full pipeline runs deterministically on a
CPU with no downloaded weights: every computation is local to one sentence,
which makes chunking a long paragraph at sentence boundaries provably
output-identical to encoding it whole. A pretrained-transformer wrapper with
the same interface is provided for real runs; it chunks at sentence
boundaries too, but cross-sentence attention inside a chunk means its
transparency is approximate rather than exact.
"""

import hashlib
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from rwkit.schema import Paragraph


@dataclass
class EncoderConfig:
    kind: str = "hash"  # "hash" or "transformer"
    dim: int = 64
    seed: int = 0
    context_weight: float = 0.5
    positional_scale: float = 0.1
    model_name: str = "allenai/scibert_scivocab_uncased"
    max_tokens: int = 512

    def to_dict(self) -> dict:
        return self.__dict__.copy()


def _positional(dim: int, position: int, scale: float) -> np.ndarray:
    pe = np.zeros(dim, dtype=np.float64)
    for i in range(0, dim, 2):
        angle = position / (10000 ** (i / dim))
        pe[i] = math.sin(angle)
        if i + 1 < dim:
            pe[i + 1] = math.cos(angle)
    return scale * pe


class HashEmbeddingEncoder:
    """Frozen deterministic token encoder.

    A token's base vector is seeded from a blake2b digest of its text, then
    mixed with the mean vector of its sentence and a sentence-relative
    positional component. No trainable parameters.
    """

    def __init__(self, config: EncoderConfig | None = None) -> None:
        self.config = config or EncoderConfig()

    @property
    def dim(self) -> int:
        return self.config.dim

    def trainable_parameters(self) -> list:
        return []

    @lru_cache(maxsize=65536)
    def _base_vector(self, token: str) -> np.ndarray:
        digest = hashlib.blake2b(
            token.encode("utf-8"),
            digest_size=8,
            salt=str(self.config.seed).encode("utf-8")[:16],
        ).digest()
        rng = np.random.default_rng(int.from_bytes(digest, "big"))
        return rng.standard_normal(self.config.dim) / math.sqrt(self.config.dim)

    def _encode_sentence(self, tokens: list[str]) -> np.ndarray:
        base = np.stack([self._base_vector(t) for t in tokens])
        center = base.mean(axis=0, keepdims=True)
        mixed = (1.0 - self.config.context_weight) * base + (
            self.config.context_weight * center
        )
        for pos in range(len(tokens)):
            mixed[pos] += _positional(
                self.config.dim, pos, self.config.positional_scale
            )
        return mixed

    def encode_paragraph(
        self, paragraph: Paragraph, chunk_sentences: int | None = None
    ) -> np.ndarray:
        """(n_tokens, dim) array; `chunk_sentences` groups sentences into
        chunks processed independently, which must not change the output.
        """
        bounds = paragraph.sentence_token_bounds()
        texts = paragraph.token_texts()
        n = len(bounds)
        step = chunk_sentences or n or 1
        rows: list[np.ndarray] = []
        for chunk_start in range(0, n, step):
            for s, e in bounds[chunk_start : chunk_start + step]:
                if e > s:
                    rows.append(self._encode_sentence(texts[s:e]))
        if not rows:
            return np.zeros((0, self.config.dim), dtype=np.float32)
        return np.concatenate(rows).astype(np.float32)


class TransformerEncoder:
    """Pretrained-transformer token encoder (optional dependency).

    Wordpieces are mean-pooled back to our tokens. Paragraphs longer than
    `max_tokens` wordpieces are split into chunks of whole sentences.
    """

    def __init__(self, config: EncoderConfig) -> None:
        import torch  # noqa: F401  (required by transformers at runtime)
        from transformers import AutoModel, AutoTokenizer

        self.config = config
        self.tokenizer = AutoTokenizer.from_pretrained(config.model_name)
        self.model = AutoModel.from_pretrained(config.model_name)
        self.model.eval()

    @property
    def dim(self) -> int:
        return self.model.config.hidden_size

    def trainable_parameters(self) -> list:
        return list(self.model.parameters())

    def _chunk(self, paragraph: Paragraph) -> list[tuple[int, int]]:
        bounds = paragraph.sentence_token_bounds()
        texts = paragraph.token_texts()
        chunks, start, budget = [], 0, 0
        for i, (s, e) in enumerate(bounds):
            pieces = sum(
                len(self.tokenizer.tokenize(t)) for t in texts[s:e]
            )
            if budget and budget + pieces > self.config.max_tokens:
                chunks.append((start, i))
                start, budget = i, 0
            budget += pieces
        chunks.append((start, len(bounds)))
        return chunks

    def encode_paragraph(
        self, paragraph: Paragraph, chunk_sentences: int | None = None
    ) -> np.ndarray:
        import torch

        bounds = paragraph.sentence_token_bounds()
        texts = paragraph.token_texts()
        rows = []
        for cs, ce in self._chunk(paragraph):
            words = texts[bounds[cs][0] : bounds[ce - 1][1]]
            enc = self.tokenizer(
                words,
                is_split_into_words=True,
                return_tensors="pt",
                truncation=True,
                max_length=self.config.max_tokens,
            )
            with torch.no_grad():
                hidden = self.model(**enc).last_hidden_state[0]
            word_ids = enc.word_ids(0)
            pooled = np.zeros((len(words), self.dim), dtype=np.float32)
            counts = np.zeros(len(words), dtype=np.int64)
            for piece, wid in enumerate(word_ids):
                if wid is not None:
                    pooled[wid] += hidden[piece].numpy()
                    counts[wid] += 1
            counts[counts == 0] = 1
            rows.append(pooled / counts[:, None])
        return np.concatenate(rows) if rows else np.zeros((0, self.dim), np.float32)


def get_encoder(config: EncoderConfig):
    if config.kind == "hash":
        return HashEmbeddingEncoder(config)
    if config.kind == "transformer":
        return TransformerEncoder(config)
    raise ValueError(f"unknown encoder kind {config.kind!r}")
