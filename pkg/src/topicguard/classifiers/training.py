"""Binary cross-entropy fine-tuning of the layers above the frozen backbone.

Input features are precomputed once per prompt (the backbone never changes),
so epochs only pay for the small trainable stack. With a fixed seed the whole
run is deterministic: initialization, shuffling, and therefore the final
parameters.
"""

from __future__ import annotations

import copy
import logging
import math
import random
from dataclasses import dataclass
from typing import Any

import numpy as np
import torch
from torch import Tensor, nn

from topicguard.core.records import LabeledPair, PromptDataset
from topicguard.classifiers.models import (
    GuardrailModel,
    ModelConfig,
    build_cross_input,
    build_model,
    pad_stack,
)
from topicguard.evalharness.metrics import MetricError, ScoredSet, roc_auc

logger = logging.getLogger(__name__)


class TrainingError(RuntimeError):
    """Training preconditions failed or the loss diverged."""


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 10
    batch_size: int = 32
    learning_rate: float = 1e-4
    weight_decay: float = 0.01
    seed: int = 0
    early_stopping_patience: int = 3

    def __post_init__(self) -> None:
        if self.epochs < 0:
            raise TrainingError(f"epochs must be >= 0, got {self.epochs}")
        if self.batch_size < 1:
            raise TrainingError(f"batch_size must be positive, got {self.batch_size}")
        if self.learning_rate <= 0:
            raise TrainingError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.weight_decay < 0:
            raise TrainingError(f"weight_decay must be >= 0, got {self.weight_decay}")
        if self.early_stopping_patience < 1:
            raise TrainingError(
                f"early_stopping_patience must be >= 1, got {self.early_stopping_patience}"
            )

    def to_dict(self) -> dict[str, Any]:
        return {
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "learning_rate": self.learning_rate,
            "weight_decay": self.weight_decay,
            "seed": self.seed,
            "early_stopping_patience": self.early_stopping_patience,
        }


def _training_pairs(dataset: PromptDataset) -> tuple[list[LabeledPair], list[LabeledPair]]:
    """Resolve (train, val) pairs: explicit splits when present, else all-train."""
    if dataset.split_assignment:
        return list(dataset.split("train")), list(dataset.split("val"))
    return list(dataset.pairs), []


class _FeatureCache:
    """Precomputed per-example backbone features for one model kind."""

    def __init__(self, model: GuardrailModel, pairs: list[LabeledPair]):
        self.kind = model.kind
        backbone = model.backbone
        if model.kind == "bi_encoder":
            limit = model.config.effective_max_tokens
            texts = {p.system_prompt for p in pairs} | {p.user_prompt for p in pairs}
            encoded = {t: backbone.encode(t, limit=limit) for t in texts}
            self.system = [encoded[p.system_prompt] for p in pairs]
            self.user = [encoded[p.user_prompt] for p in pairs]
        else:
            self.joint = [
                backbone.token_vectors(
                    build_cross_input(
                        p.system_prompt,
                        p.user_prompt,
                        model.config.truncation_policy,
                        model.config.max_tokens,
                    )
                )
                for p in pairs
            ]
        self.targets = torch.tensor([float(p.label) for p in pairs])

    def batch(self, net: nn.Module, indices: list[int]) -> tuple[Tensor, Tensor]:
        """Forward the selected examples; returns (logits, targets)."""
        if self.kind == "bi_encoder":
            s_vecs, s_mask = pad_stack([self.system[i] for i in indices])
            u_vecs, u_mask = pad_stack([self.user[i] for i in indices])
            logits = net(s_vecs, s_mask, u_vecs, u_mask)
        else:
            vecs, mask = pad_stack([self.joint[i] for i in indices])
            logits = net(vecs, mask)
        return logits, self.targets[indices]


def _validation_auc(net: nn.Module, cache: _FeatureCache, n_val: int) -> float | None:
    if n_val == 0:
        return None
    with torch.no_grad():
        logits, targets = cache.batch(net, list(range(n_val)))
    labels = [int(t) for t in targets.tolist()]
    try:
        return roc_auc(ScoredSet(tuple(torch.sigmoid(logits).tolist()), tuple(labels)))
    except MetricError:
        logger.warning("validation split is single-class; skipping early stopping")
        return None


def train(
    kind: str,
    dataset: PromptDataset,
    train_config: TrainConfig | None = None,
    model_config: ModelConfig | None = None,
) -> tuple[GuardrailModel, list[dict[str, Any]]]:
    """Fit the trainable layers; returns the model and per-epoch history.

    Uses the dataset's train/val splits when assigned, otherwise trains on
    every pair with no validation. Early stopping tracks val ROC-AUC with the
    configured patience and restores the best epoch's parameters. History
    rows: {"epoch", "train_loss", "val_auc"} (val_auc None without a usable
    validation split).
    """
    config = train_config or TrainConfig()
    train_pairs, val_pairs = _training_pairs(dataset)
    if not train_pairs:
        raise TrainingError("no training pairs available")
    labels = {p.label for p in train_pairs}
    if labels != {0, 1}:
        raise TrainingError("training split must contain both classes")

    model = build_model(kind, model_config, seed=config.seed)
    net = model.net
    history: list[dict[str, Any]] = []
    if config.epochs == 0:
        return model, history

    train_cache = _FeatureCache(model, train_pairs)
    val_cache = _FeatureCache(model, val_pairs) if val_pairs else None

    optimizer = torch.optim.AdamW(
        net.parameters(), lr=config.learning_rate, weight_decay=config.weight_decay
    )
    loss_fn = nn.BCEWithLogitsLoss()
    shuffler = random.Random(config.seed)

    best_auc = -math.inf
    best_state: dict[str, Tensor] | None = None
    epochs_since_best = 0

    net.train()
    for epoch in range(1, config.epochs + 1):
        indices = list(range(len(train_pairs)))
        shuffler.shuffle(indices)
        losses = []
        for start in range(0, len(indices), config.batch_size):
            batch_idx = indices[start : start + config.batch_size]
            logits, targets = train_cache.batch(net, batch_idx)
            loss = loss_fn(logits, targets)
            if not torch.isfinite(loss):
                raise TrainingError(
                    f"non-finite loss at epoch {epoch}, batch starting {start}: {float(loss.detach())!r}"
                )
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            losses.append(float(loss.detach()))

        val_auc = _validation_auc(net, val_cache, len(val_pairs)) if val_cache else None
        history.append(
            {"epoch": epoch, "train_loss": float(np.mean(losses)), "val_auc": val_auc}
        )

        if val_auc is not None:
            if val_auc > best_auc:
                best_auc = val_auc
                best_state = copy.deepcopy(net.state_dict())
                epochs_since_best = 0
            else:
                epochs_since_best += 1
                if epochs_since_best >= config.early_stopping_patience:
                    logger.info("early stop at epoch %d (best val AUC %.4f)", epoch, best_auc)
                    break

    if best_state is not None:
        net.load_state_dict(best_state)
    net.eval()
    return model, history
