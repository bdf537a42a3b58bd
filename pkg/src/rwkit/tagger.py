"""Joint neural tagger: discourse labels, citation spans, citation types.

One shared token trunk feeds two token-level BIO heads (span boundaries and
typed spans) and an attention-pooled sentence head for discourse labels. The
three cross-entropy losses combine as

    L = gamma_d * L_disc + gamma_s * L_span + gamma_t * L_type
"""

import json
from dataclasses import dataclass
from pathlib import Path

import torch
import torch.nn.functional as F
from torch import nn

from rwkit import dataio
from rwkit.encoders import EncoderConfig, get_encoder
from rwkit.schema import (
    CS_TAGS,
    CT_TAGS,
    DISCOURSE_LABELS,
    LabeledParagraph,
    Paragraph,
    TagSequence,
    from_bio,
    repair_prediction,
    repair_tags,
    to_bio,
)

SCHEMA_VERSION = 1

DISC_INDEX = {label: i for i, label in enumerate(DISCOURSE_LABELS)}
CS_INDEX = {tag: i for i, tag in enumerate(CS_TAGS)}
CT_INDEX = {tag: i for i, tag in enumerate(CT_TAGS)}


@dataclass
class TaggerConfig:
    dim: int = 64
    hidden: int = 128
    dropout: float = 0.0

    def to_dict(self) -> dict:
        return self.__dict__.copy()


@dataclass
class LossWeights:
    gamma_d: float = 1.0
    gamma_s: float = 1.75
    gamma_t: float = 3.0

    def to_dict(self) -> dict:
        return self.__dict__.copy()


def combine_losses(l_d, l_s, l_t, weights: LossWeights):
    return weights.gamma_d * l_d + weights.gamma_s * l_s + weights.gamma_t * l_t


class JointTaggerHeads(nn.Module):
    def __init__(self, config: TaggerConfig) -> None:
        super().__init__()
        self.config = config
        h = config.hidden
        self.trunk = nn.Sequential(
            nn.Linear(config.dim, h), nn.ReLU(), nn.Dropout(config.dropout)
        )
        self.cs_head = nn.Linear(h, len(CS_TAGS))
        self.ct_head = nn.Linear(h, len(CT_TAGS))
        self.attn_score = nn.Linear(h, 1)
        self.attn_value = nn.Linear(h, h)
        self.disc_head = nn.Linear(h, len(DISCOURSE_LABELS))

    def pool_sentences(
        self, hidden: torch.Tensor, bounds: list[tuple[int, int]]
    ) -> torch.Tensor:
        """Attention-pool token states per sentence. A single-token sentence
        pools to exactly the value projection of its token.
        """
        values = self.attn_value(hidden)
        scores = self.attn_score(torch.tanh(hidden)).squeeze(-1)
        pooled = []
        for s, e in bounds:
            if e <= s:
                pooled.append(values.new_zeros(values.shape[-1]))
                continue
            weights = torch.softmax(scores[s:e], dim=0)
            pooled.append(weights @ values[s:e])
        return torch.stack(pooled)

    def forward(
        self, embeddings: torch.Tensor, bounds: list[tuple[int, int]]
    ) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
        hidden = self.trunk(embeddings)
        disc_logits = self.disc_head(self.pool_sentences(hidden, bounds))
        return disc_logits, self.cs_head(hidden), self.ct_head(hidden)


def gold_targets(lp: LabeledParagraph) -> tuple[list[int], list[int], list[int]]:
    tags = to_bio(lp)
    disc = [DISC_INDEX[label] for label in lp.sentence_labels]
    cs = [CS_INDEX[t] for t in tags.cs_tags]
    ct = [CT_INDEX[t] for t in tags.ct_tags]
    return disc, cs, ct


def joint_loss(
    logits: tuple[torch.Tensor, torch.Tensor, torch.Tensor],
    targets: tuple[list[int], list[int], list[int]],
    weights: LossWeights,
) -> torch.Tensor:
    disc_logits, cs_logits, ct_logits = logits
    device = disc_logits.device

    def ce(out: torch.Tensor, ids: list[int]) -> torch.Tensor:
        return F.cross_entropy(out, torch.tensor(ids, device=device))

    l_d = ce(disc_logits, targets[0])
    l_s = ce(cs_logits, targets[1])
    l_t = ce(ct_logits, targets[2])
    return combine_losses(l_d, l_s, l_t, weights)


class TaggerModel:
    """Encoder plus heads, with decoding back into schema objects."""

    def __init__(
        self,
        encoder_config: EncoderConfig | None = None,
        tagger_config: TaggerConfig | None = None,
    ) -> None:
        self.encoder_config = encoder_config or EncoderConfig()
        self.encoder = get_encoder(self.encoder_config)
        self.tagger_config = tagger_config or TaggerConfig(dim=self.encoder.dim)
        if self.tagger_config.dim != self.encoder.dim:
            raise ValueError(
                f"head input dim {self.tagger_config.dim} != encoder dim {self.encoder.dim}"
            )
        self.heads = JointTaggerHeads(self.tagger_config)

    def embed(self, paragraph: Paragraph) -> torch.Tensor:
        return torch.from_numpy(self.encoder.encode_paragraph(paragraph))

    def logits(self, paragraph: Paragraph, embeddings: torch.Tensor | None = None):
        if embeddings is None:
            embeddings = self.embed(paragraph)
        return self.heads(embeddings, paragraph.sentence_token_bounds())

    def predict_tags(self, paragraph: Paragraph) -> tuple[list[str], TagSequence]:
        """Greedy decode: argmax per sentence and per token, then BIO repair."""
        self.heads.eval()
        with torch.no_grad():
            disc_logits, cs_logits, ct_logits = self.logits(paragraph)
        labels = [DISCOURSE_LABELS[i] for i in disc_logits.argmax(dim=-1).tolist()]
        cs = [CS_TAGS[i] for i in cs_logits.argmax(dim=-1).tolist()]
        ct = [CT_TAGS[i] for i in ct_logits.argmax(dim=-1).tolist()]
        return labels, TagSequence(cs_tags=repair_tags(cs), ct_tags=repair_tags(ct))

    def predict(self, paragraph: Paragraph) -> LabeledParagraph:
        """Decode to a schema-valid labeled paragraph."""
        labels, tags = self.predict_tags(paragraph)
        spans = from_bio(tags, paragraph)
        raw = LabeledParagraph(
            paragraph=paragraph, sentence_labels=labels, spans=spans
        )
        return repair_prediction(raw)

    def save(self, directory: str | Path) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        torch.save(self.heads.state_dict(), directory / "heads.pt")
        meta = {
            "schema_version": SCHEMA_VERSION,
            "encoder": self.encoder_config.to_dict(),
            "tagger": self.tagger_config.to_dict(),
            "discourse_labels": list(DISCOURSE_LABELS),
            "cs_tags": list(CS_TAGS),
            "ct_tags": list(CT_TAGS),
        }
        (directory / "config.json").write_text(
            dataio.canonical_json(meta), encoding="utf-8"
        )

    @classmethod
    def load(cls, directory: str | Path) -> "TaggerModel":
        directory = Path(directory)
        meta = json.loads((directory / "config.json").read_text(encoding="utf-8"))
        if meta.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(
                f"checkpoint schema version {meta.get('schema_version')} "
                f"not supported (want {SCHEMA_VERSION})"
            )
        if meta.get("discourse_labels") != list(DISCOURSE_LABELS):
            raise ValueError("checkpoint label set does not match this build")
        model = cls(
            encoder_config=EncoderConfig(**meta["encoder"]),
            tagger_config=TaggerConfig(**meta["tagger"]),
        )
        model.heads.load_state_dict(
            torch.load(directory / "heads.pt", map_location="cpu")
        )
        return model
