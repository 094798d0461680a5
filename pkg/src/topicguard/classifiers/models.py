"""Model configurations, input assembly, networks, and the predict wrapper.

Two architectures share one contract: predict(S, U) -> p in [0, 1].

- bi_encoder: S and U are embedded separately by the frozen backbone; each
  branch runs a bottleneck adapter, attends into the other branch, and is
  attention-pooled; the concatenated pooled vectors feed the head.
- cross_encoder: S and U are merged into one marked-up token sequence under a
  token budget; the backbone vectors run adapter, pooling, and head.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np
import torch
from torch import Tensor, nn

from topicguard.core.errors import InputError
from topicguard.classifiers.backbone import TextBackbone, resolve_backbone, tokenize
from topicguard.classifiers.layers import (
    AttentionPooling,
    BottleneckAdapter,
    ClassificationHead,
    CrossAttention,
    LayerConfigError,
)

KINDS = ("bi_encoder", "cross_encoder")
TRUNCATION_POLICIES = ("truncate_user_first", "proportional")

BOS_TOKEN = "<bos>"
SEP_TOKEN = "<sep>"
EOS_TOKEN = "<eos>"
# One marker before, between, and after the two prompts.
_N_SPECIALS = 3


class ModelConfigError(ValueError):
    """A model configuration violates its invariants."""


def _require_positive(**fields: int) -> None:
    for name, value in fields.items():
        if not isinstance(value, int) or value < 1:
            raise ModelConfigError(f"{name} must be a positive integer, got {value!r}")


@dataclass(frozen=True)
class BiEncoderConfig:
    """Dual-branch architecture knobs."""

    checkpoint_id: str = "hash-64"
    adapter_dim: int = 64
    n_cross_attention_heads: int = 4
    head_hidden_dim: int = 64
    effective_max_tokens: int = 1024
    pooling: str = "attention"

    def __post_init__(self) -> None:
        _require_positive(
            adapter_dim=self.adapter_dim,
            n_cross_attention_heads=self.n_cross_attention_heads,
            head_hidden_dim=self.head_hidden_dim,
            effective_max_tokens=self.effective_max_tokens,
        )
        if self.pooling != "attention":
            raise ModelConfigError(f"only attention pooling is supported, got {self.pooling!r}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "checkpoint_id": self.checkpoint_id,
            "adapter_dim": self.adapter_dim,
            "n_cross_attention_heads": self.n_cross_attention_heads,
            "head_hidden_dim": self.head_hidden_dim,
            "effective_max_tokens": self.effective_max_tokens,
            "pooling": self.pooling,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "BiEncoderConfig":
        return cls(**d)


@dataclass(frozen=True)
class CrossEncoderConfig:
    """Single-sequence architecture knobs."""

    checkpoint_id: str = "hash-64"
    max_tokens: int = 512
    truncation_policy: str = "truncate_user_first"
    adapter_dim: int = 64
    head_hidden_dim: int = 64

    def __post_init__(self) -> None:
        _require_positive(
            max_tokens=self.max_tokens,
            adapter_dim=self.adapter_dim,
            head_hidden_dim=self.head_hidden_dim,
        )
        if self.truncation_policy not in TRUNCATION_POLICIES:
            raise ModelConfigError(
                f"truncation_policy must be one of {TRUNCATION_POLICIES}, "
                f"got {self.truncation_policy!r}"
            )

    def to_dict(self) -> dict[str, Any]:
        return {
            "checkpoint_id": self.checkpoint_id,
            "max_tokens": self.max_tokens,
            "truncation_policy": self.truncation_policy,
            "adapter_dim": self.adapter_dim,
            "head_hidden_dim": self.head_hidden_dim,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "CrossEncoderConfig":
        return cls(**d)


ModelConfig = BiEncoderConfig | CrossEncoderConfig


def default_config(kind: str) -> ModelConfig:
    if kind == "bi_encoder":
        return BiEncoderConfig()
    if kind == "cross_encoder":
        return CrossEncoderConfig()
    raise ModelConfigError(f"unknown model kind {kind!r}; expected one of {KINDS}")


def config_from_dict(kind: str, d: dict[str, Any]) -> ModelConfig:
    if kind == "bi_encoder":
        return BiEncoderConfig.from_dict(d)
    if kind == "cross_encoder":
        return CrossEncoderConfig.from_dict(d)
    raise ModelConfigError(f"unknown model kind {kind!r}; expected one of {KINDS}")


def build_cross_input(
    system_prompt: str, user_prompt: str, policy: str, max_tokens: int
) -> list[str]:
    """Assemble the cross-encoder token sequence under the token budget.

    Layout: [begin] S-tokens [separator] U-tokens [end], never longer than
    max_tokens. truncate_user_first trims U down to one token before touching
    S; proportional gives each side floor(share * budget) by untruncated
    length, at least one token each.
    """
    if policy not in TRUNCATION_POLICIES:
        raise ModelConfigError(f"unknown truncation policy {policy!r}")
    s_tokens = tokenize(system_prompt)
    u_tokens = tokenize(user_prompt)
    if not s_tokens or not u_tokens:
        raise InputError("both prompts must be non-empty")
    budget = max_tokens - _N_SPECIALS
    if budget < 2:
        raise InputError(
            f"max_tokens {max_tokens} cannot hold {_N_SPECIALS} markers plus one token per side"
        )

    n_s, n_u = len(s_tokens), len(u_tokens)
    if n_s + n_u <= budget:
        s_keep, u_keep = n_s, n_u
    elif policy == "truncate_user_first":
        s_keep = min(n_s, budget - 1)
        u_keep = budget - s_keep
    else:
        s_keep = max(1, budget * n_s // (n_s + n_u))
        u_keep = budget - s_keep
        if s_keep > n_s:
            u_keep += s_keep - n_s
            s_keep = n_s
        if u_keep > n_u:
            s_keep = min(n_s, s_keep + (u_keep - n_u))
            u_keep = n_u
        u_keep = max(1, u_keep)

    return [BOS_TOKEN] + s_tokens[:s_keep] + [SEP_TOKEN] + u_tokens[:u_keep] + [EOS_TOKEN]


class BiEncoderNet(nn.Module):
    """Adapters, symmetric cross-attention, per-branch pooling, shared head."""

    def __init__(self, hidden_dim: int, config: BiEncoderConfig):
        super().__init__()
        self.adapter_system = BottleneckAdapter(hidden_dim, config.adapter_dim)
        self.adapter_user = BottleneckAdapter(hidden_dim, config.adapter_dim)
        self.cross_system = CrossAttention(hidden_dim, config.n_cross_attention_heads)
        self.cross_user = CrossAttention(hidden_dim, config.n_cross_attention_heads)
        self.pool_system = AttentionPooling(hidden_dim)
        self.pool_user = AttentionPooling(hidden_dim)
        self.head = ClassificationHead(2 * hidden_dim, config.head_hidden_dim)

    def features(self, s_vecs: Tensor, s_mask: Tensor, u_vecs: Tensor, u_mask: Tensor) -> Tensor:
        hs = self.adapter_system(s_vecs)
        hu = self.adapter_user(u_vecs)
        attended_s = self.cross_system(hs, hu, u_mask)
        attended_u = self.cross_user(hu, hs, s_mask)
        pooled_s = self.pool_system(attended_s, s_mask)
        pooled_u = self.pool_user(attended_u, u_mask)
        return torch.cat([pooled_s, pooled_u], dim=-1)

    def forward(self, s_vecs: Tensor, s_mask: Tensor, u_vecs: Tensor, u_mask: Tensor) -> Tensor:
        return self.head(self.features(s_vecs, s_mask, u_vecs, u_mask))


class CrossEncoderNet(nn.Module):
    """Adapter, pooling, and head over the merged token sequence."""

    def __init__(self, hidden_dim: int, config: CrossEncoderConfig):
        super().__init__()
        self.adapter = BottleneckAdapter(hidden_dim, config.adapter_dim)
        self.pool = AttentionPooling(hidden_dim)
        self.head = ClassificationHead(hidden_dim, config.head_hidden_dim)

    def forward(self, vecs: Tensor, mask: Tensor) -> Tensor:
        return self.head(self.pool(self.adapter(vecs), mask))


def pad_stack(arrays: Sequence[np.ndarray]) -> tuple[Tensor, Tensor]:
    """Stack variable-length (T_i, H) arrays into (B, T, H) plus a boolean mask."""
    longest = max(a.shape[0] for a in arrays)
    hidden = arrays[0].shape[1]
    out = torch.zeros(len(arrays), longest, hidden, dtype=torch.float32)
    mask = torch.zeros(len(arrays), longest, dtype=torch.bool)
    for i, arr in enumerate(arrays):
        out[i, : arr.shape[0]] = torch.from_numpy(np.ascontiguousarray(arr))
        mask[i, : arr.shape[0]] = True
    return out, mask


def _check_prompts(system_prompt: str, user_prompt: str) -> None:
    if not system_prompt.strip():
        raise InputError("system prompt must be non-empty")
    if not user_prompt.strip():
        raise InputError("user prompt must be non-empty")


class GuardrailModel:
    """Immutable predict(S, U) -> p wrapper around a trained network.

    Inference is deterministic: no dropout, no sampling, gradients disabled.
    Instances are safe to share across threads once constructed.
    """

    def __init__(
        self, kind: str, config: ModelConfig, backbone: TextBackbone, net: nn.Module
    ):
        if kind not in KINDS:
            raise ModelConfigError(f"unknown model kind {kind!r}")
        self.kind = kind
        self.config = config
        self.backbone = backbone
        self.net = net.eval()

    @property
    def model_id(self) -> str:
        return f"{self.kind}:{self.config.checkpoint_id}"

    # -- encoding -----------------------------------------------------------

    def _bi_inputs(self, pairs: Sequence[tuple[str, str]]) -> tuple[Tensor, Tensor, Tensor, Tensor]:
        limit = self.config.effective_max_tokens
        s_arrays = [self.backbone.encode(s, limit=limit) for s, _ in pairs]
        u_arrays = [self.backbone.encode(u, limit=limit) for _, u in pairs]
        s_vecs, s_mask = pad_stack(s_arrays)
        u_vecs, u_mask = pad_stack(u_arrays)
        return s_vecs, s_mask, u_vecs, u_mask

    def _cross_arrays(self, pairs: Sequence[tuple[str, str]]) -> list[np.ndarray]:
        return [
            self.backbone.token_vectors(
                build_cross_input(s, u, self.config.truncation_policy, self.config.max_tokens)
            )
            for s, u in pairs
        ]

    def logits(self, pairs: Sequence[tuple[str, str]]) -> Tensor:
        """Raw logits for a batch of (system_prompt, user_prompt) pairs."""
        for s, u in pairs:
            _check_prompts(s, u)
        with torch.no_grad():
            if self.kind == "bi_encoder":
                return self.net(*self._bi_inputs(pairs))
            vecs, mask = pad_stack(self._cross_arrays(pairs))
            return self.net(vecs, mask)

    # -- scoring ------------------------------------------------------------

    def predict(self, system_prompt: str, user_prompt: str) -> float:
        """Off-topic probability for one pair: logistic(logit), in [0, 1]."""
        return float(torch.sigmoid(self.logits([(system_prompt, user_prompt)]))[0])

    def predict_batch(self, pairs: Sequence[tuple[str, str]]) -> np.ndarray:
        if not pairs:
            return np.zeros(0, dtype=np.float64)
        return torch.sigmoid(self.logits(pairs)).numpy().astype(np.float64)

    def features(self, system_prompt: str, user_prompt: str) -> np.ndarray:
        """Bi-encoder pair feature vector (concatenated pooled branches)."""
        if self.kind != "bi_encoder":
            raise ModelConfigError("features are only defined for the bi_encoder kind")
        _check_prompts(system_prompt, user_prompt)
        with torch.no_grad():
            feats = self.net.features(*self._bi_inputs([(system_prompt, user_prompt)]))
        return feats[0].numpy()


def build_model(kind: str, config: ModelConfig | None = None, seed: int = 0) -> GuardrailModel:
    """Construct an initialized (untrained) model with seeded parameters."""
    if config is None:
        config = default_config(kind)
    backbone = resolve_backbone(config.checkpoint_id)
    if config.adapter_dim > backbone.hidden_dim:
        raise ModelConfigError(
            f"adapter_dim {config.adapter_dim} exceeds backbone hidden_dim {backbone.hidden_dim}"
        )
    with torch.random.fork_rng():
        torch.manual_seed(seed)
        try:
            if kind == "bi_encoder":
                if not isinstance(config, BiEncoderConfig):
                    raise ModelConfigError("bi_encoder requires a BiEncoderConfig")
                net: nn.Module = BiEncoderNet(backbone.hidden_dim, config)
            elif kind == "cross_encoder":
                if not isinstance(config, CrossEncoderConfig):
                    raise ModelConfigError("cross_encoder requires a CrossEncoderConfig")
                net = CrossEncoderNet(backbone.hidden_dim, config)
            else:
                raise ModelConfigError(f"unknown model kind {kind!r}; expected one of {KINDS}")
        except LayerConfigError as exc:
            raise ModelConfigError(str(exc)) from exc
    return GuardrailModel(kind, config, backbone, net)
