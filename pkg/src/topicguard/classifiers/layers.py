"""Trainable layers stacked on top of the frozen backbone.

Everything here is position-wise or mask-aware, so padded batch positions
never influence real ones: cross-attention masks padded keys, and pooling
assigns padded positions exactly zero weight.
"""

from __future__ import annotations

import torch
from torch import Tensor, nn


class LayerConfigError(ValueError):
    """A layer was configured with incompatible dimensions."""


class PoolingError(ValueError):
    """Pooling was asked to aggregate a fully masked sequence."""


def masked_softmax(scores: Tensor, mask: Tensor, dim: int = -1) -> Tensor:
    """Softmax over `dim` with masked-out positions receiving exactly zero weight.

    `mask` is boolean with True marking real positions. Raises PoolingError if
    any row along `dim` is fully masked (softmax would be undefined).
    """
    if not mask.any(dim=dim).all():
        raise PoolingError("cannot take a softmax over a fully masked sequence")
    filled = scores.masked_fill(~mask, float("-inf"))
    return torch.softmax(filled, dim=dim)


class BottleneckAdapter(nn.Module):
    """Residual bottleneck: x + up(gelu(down(x))), applied position-wise."""

    def __init__(self, hidden_dim: int, adapter_dim: int):
        super().__init__()
        if adapter_dim > hidden_dim:
            raise LayerConfigError(
                f"adapter_dim {adapter_dim} must not exceed hidden_dim {hidden_dim}"
            )
        if adapter_dim < 1:
            raise LayerConfigError("adapter_dim must be positive")
        self.down = nn.Linear(hidden_dim, adapter_dim)
        self.act = nn.GELU()
        self.up = nn.Linear(adapter_dim, hidden_dim)

    def forward(self, x: Tensor) -> Tensor:
        return x + self.up(self.act(self.down(x)))


class CrossAttention(nn.Module):
    """Multi-head attention from one token stream into another, with residual.

    Queries come from `queries`; keys and values from `context`. Padded
    context positions (mask False) are excluded from attention entirely.
    """

    def __init__(self, hidden_dim: int, n_heads: int):
        super().__init__()
        if hidden_dim % n_heads != 0:
            raise LayerConfigError(f"hidden_dim {hidden_dim} not divisible by {n_heads} heads")
        self.attn = nn.MultiheadAttention(hidden_dim, n_heads, batch_first=True)

    def forward(self, queries: Tensor, context: Tensor, context_mask: Tensor) -> Tensor:
        attended, _ = self.attn(
            queries, context, context, key_padding_mask=~context_mask, need_weights=False
        )
        return queries + attended


class AttentionPooling(nn.Module):
    """Learned weighted average over token vectors.

    A scoring vector assigns each token a scalar; masked softmax turns the
    scores into a probability distribution over real positions.
    """

    def __init__(self, hidden_dim: int):
        super().__init__()
        self.score = nn.Linear(hidden_dim, 1, bias=False)

    def forward(self, tokens: Tensor, mask: Tensor) -> Tensor:
        weights = self.pool_weights(tokens, mask)
        return torch.einsum("bt,bth->bh", weights, tokens)

    def pool_weights(self, tokens: Tensor, mask: Tensor) -> Tensor:
        """The attention distribution itself: sums to 1, zero where masked."""
        return masked_softmax(self.score(tokens).squeeze(-1), mask)


def attention_pool(token_vectors: Tensor, mask: Tensor, scoring_vector: Tensor) -> Tensor:
    """Functional single-sequence pooling: weights from `scoring_vector` scores.

    `token_vectors` is (T, H), `mask` a boolean (T,), `scoring_vector` (H,).
    Output = sum_i w_i v_i with w a masked softmax of v_i . scoring_vector.
    """
    if token_vectors.ndim != 2 or mask.ndim != 1:
        raise LayerConfigError("attention_pool expects (T, H) vectors and a (T,) mask")
    weights = masked_softmax(token_vectors @ scoring_vector, mask, dim=0)
    return weights @ token_vectors


class ClassificationHead(nn.Module):
    """Two-layer MLP to a single logit.

    The final layer starts at zero so an untrained model scores exactly 0.5
    after the logistic map.
    """

    def __init__(self, in_dim: int, hidden_dim: int):
        super().__init__()
        self.hidden = nn.Linear(in_dim, hidden_dim)
        self.act = nn.GELU()
        self.out = nn.Linear(hidden_dim, 1)
        nn.init.zeros_(self.out.weight)
        nn.init.zeros_(self.out.bias)

    def forward(self, x: Tensor) -> Tensor:
        return self.out(self.act(self.hidden(x))).squeeze(-1)
