"""Deterministic training for the joint tagger.

Batches are single paragraphs; gradients accumulate over `steps_per_update`
paragraphs before each optimizer step. Frozen encoders have their paragraph
embeddings computed once and reused across epochs.
"""

import random
from dataclasses import dataclass, field
from pathlib import Path

import torch

from rwkit import dataio
from rwkit.encoders import EncoderConfig
from rwkit.metrics import micro_f1
from rwkit.schema import LabeledParagraph, Paragraph, to_bio
from rwkit.tagger import (
    LossWeights,
    TaggerConfig,
    TaggerModel,
    gold_targets,
    joint_loss,
)


@dataclass
class TrainConfig:
    encoder_lr: float = 1e-5
    decoder_lr: float = 5e-6
    dropout: float = 0.0
    epochs: int = 15
    batch_size: int = 1
    steps_per_update: int = 10
    seed: int = 0
    weights: LossWeights = field(default_factory=LossWeights)
    log_path: str | None = None

    def to_dict(self) -> dict:
        d = self.__dict__.copy()
        d["weights"] = self.weights.to_dict()
        return d


def make_model(
    config: TrainConfig, encoder_config: EncoderConfig | None = None
) -> TaggerModel:
    # head init draws from the global torch generator; seed before each
    # construction so a fresh process builds the same model
    encoder_config = encoder_config or EncoderConfig()
    torch.manual_seed(config.seed)
    model = TaggerModel(encoder_config=encoder_config)
    if config.dropout != model.tagger_config.dropout:
        torch.manual_seed(config.seed)
        model = TaggerModel(
            encoder_config=encoder_config,
            tagger_config=TaggerConfig(dim=model.encoder.dim, dropout=config.dropout),
        )
    return model


def _optimizer(model: TaggerModel, config: TrainConfig) -> torch.optim.Optimizer:
    groups = [{"params": model.heads.parameters(), "lr": config.decoder_lr}]
    encoder_params = model.encoder.trainable_parameters()
    if encoder_params:
        groups.append({"params": encoder_params, "lr": config.encoder_lr})
    return torch.optim.Adam(groups)


def evaluate(model: TaggerModel, data: list[LabeledParagraph]) -> dict[str, float]:
    """Micro-F1 per task over the concatenated corpus. Outside tags do not
    count for the two tagging tasks; every discourse label counts.
    """
    gold_disc, pred_disc = [], []
    gold_cs, pred_cs = [], []
    gold_ct, pred_ct = [], []
    for lp in data:
        gold = to_bio(lp)
        labels, tags = model.predict_tags(lp.paragraph)
        gold_disc += lp.sentence_labels
        pred_disc += labels
        gold_cs += gold.cs_tags
        pred_cs += tags.cs_tags
        gold_ct += gold.ct_tags
        pred_ct += tags.ct_tags
    return {
        "disc": micro_f1(gold_disc, pred_disc),
        "cs": micro_f1(gold_cs, pred_cs, ignore=frozenset({"O"})),
        "ct": micro_f1(gold_ct, pred_ct, ignore=frozenset({"O"})),
    }


def train(
    model: TaggerModel,
    data: list[LabeledParagraph],
    config: TrainConfig,
    dev: list[LabeledParagraph] | None = None,
) -> list[dict]:
    """Train in place; returns the per-epoch history that was also logged."""
    if not data:
        raise ValueError("no training data")
    torch.manual_seed(config.seed)
    order_rng = random.Random(config.seed)

    frozen_encoder = not model.encoder.trainable_parameters()
    cache: list[torch.Tensor] = []
    if frozen_encoder:
        cache = [model.embed(lp.paragraph) for lp in data]
    targets = [gold_targets(lp) for lp in data]

    optimizer = _optimizer(model, config)
    log_file = None
    if config.log_path:
        Path(config.log_path).parent.mkdir(parents=True, exist_ok=True)
        log_file = open(config.log_path, "a", encoding="utf-8")

    history = []
    try:
        for epoch in range(config.epochs):
            model.heads.train()
            order = list(range(len(data)))
            order_rng.shuffle(order)
            optimizer.zero_grad()
            total = 0.0
            pending = 0
            for step, i in enumerate(order):
                lp = data[i]
                emb = cache[i] if frozen_encoder else model.embed(lp.paragraph)
                logits = model.heads(emb, lp.paragraph.sentence_token_bounds())
                loss = joint_loss(logits, targets[i], config.weights)
                if not torch.isfinite(loss):
                    raise RuntimeError(
                        f"non-finite loss at epoch {epoch} step {step}"
                    )
                (loss / config.steps_per_update).backward()
                total += loss.item()
                pending += 1
                if pending == config.steps_per_update:
                    optimizer.step()
                    optimizer.zero_grad()
                    pending = 0
            if pending:
                optimizer.step()
                optimizer.zero_grad()
            entry = {
                "epoch": epoch,
                "loss": total / len(data),
                "train": evaluate(model, data),
            }
            if dev is not None:
                entry["dev"] = evaluate(model, dev)
            history.append(entry)
            if log_file:
                log_file.write(dataio.canonical_json(entry) + "\n")
                log_file.flush()
    finally:
        if log_file:
            log_file.close()
    return history


def paper_folds(data: list[LabeledParagraph], folds: int) -> list[list[int]]:
    """Round-robin assignment of whole papers to folds, by sorted paper id,
    so no paper straddles a train/validation boundary.
    """
    papers: dict[str, list[int]] = {}
    for i, lp in enumerate(data):
        papers.setdefault(lp.paragraph.paper_id or f"#{i}", []).append(i)
    assignment: list[list[int]] = [[] for _ in range(folds)]
    for k, paper in enumerate(sorted(papers)):
        assignment[k % folds].extend(papers[paper])
    return assignment


def cross_validate(
    data: list[LabeledParagraph],
    config: TrainConfig,
    folds: int = 5,
    encoder_config: EncoderConfig | None = None,
) -> dict:
    fold_indices = paper_folds(data, folds)
    results = []
    for k, held_out in enumerate(fold_indices):
        if not held_out:
            continue
        held = set(held_out)
        train_set = [lp for i, lp in enumerate(data) if i not in held]
        val_set = [data[i] for i in held_out]
        model = make_model(config, encoder_config)
        train(model, train_set, config)
        results.append({"fold": k, "metrics": evaluate(model, val_set)})
    mean = {
        task: sum(r["metrics"][task] for r in results) / len(results)
        for task in ("disc", "cs", "ct")
    }
    return {"folds": results, "mean": mean}


def distant_supervision(
    gold: list[LabeledParagraph],
    unlabeled: list[Paragraph],
    config: TrainConfig,
    rounds: int = 1,
    encoder_config: EncoderConfig | None = None,
) -> tuple[TaggerModel, dict]:
    """Self-training: tag unlabeled paragraphs with a gold-trained model,
    then retrain from scratch on gold plus silver each round.
    """
    model = make_model(config, encoder_config)
    train(model, gold, config)
    info = {"rounds": rounds, "silver": 0}
    for _ in range(rounds):
        silver = [model.predict(p) for p in unlabeled]
        info["silver"] = len(silver)
        model = make_model(config, encoder_config)
        train(model, gold + silver, config)
    return model, info
