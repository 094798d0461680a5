"""Analytic-vs-numeric gradient agreement for every trainable layer."""

import random

import torch

from gradient_oracle import max_gradient_error
from topicguard.classifiers import (
    AttentionPooling,
    BiEncoderConfig,
    BiEncoderNet,
    BottleneckAdapter,
    ClassificationHead,
    CrossAttention,
    CrossEncoderConfig,
    CrossEncoderNet,
)

TOLERANCE = 1e-4


def _mask(rng: random.Random, batch: int, length: int) -> torch.Tensor:
    mask = torch.tensor(
        [[rng.random() > 0.3 for _ in range(length)] for _ in range(batch)]
    )
    mask[:, 0] = True
    return mask


def _random_case(rng: random.Random):
    batch = rng.randint(1, 3)
    length = rng.randint(2, 5)
    heads = rng.choice([1, 2])
    hidden = heads * rng.randint(2, 5)
    adapter = rng.randint(1, hidden)
    kind = rng.choice(["adapter", "cross_attention", "pooling", "head"])
    gen = torch.Generator().manual_seed(rng.randint(0, 10**6))

    if kind == "adapter":
        module = BottleneckAdapter(hidden, adapter)
        inputs = [torch.randn(batch, length, hidden, generator=gen)]
    elif kind == "cross_attention":
        module = CrossAttention(hidden, heads)
        inputs = [
            torch.randn(batch, length, hidden, generator=gen),
            torch.randn(batch, length + 1, hidden, generator=gen),
            _mask(rng, batch, length + 1),
        ]
    elif kind == "pooling":
        module = AttentionPooling(hidden)
        inputs = [torch.randn(batch, length, hidden, generator=gen), _mask(rng, batch, length)]
    else:
        module = ClassificationHead(hidden, rng.randint(1, 6))
        inputs = [torch.randn(batch, hidden, generator=gen)]
    return kind, module, inputs


def test_individual_layer_gradients_match_finite_differences():
    rng = random.Random(20240521)
    seen: set[str] = set()
    for case in range(24):
        kind, module, inputs = _random_case(rng)
        seen.add(kind)
        error = max_gradient_error(module, inputs, seed=case)
        assert error < TOLERANCE, f"{kind} case {case}: relative error {error:.3e}"
    assert seen == {"adapter", "cross_attention", "pooling", "head"}


def test_full_network_gradients_match_finite_differences():
    gen = torch.Generator().manual_seed(7)
    bi = BiEncoderNet(
        4, BiEncoderConfig(checkpoint_id="hash-4", adapter_dim=3, n_cross_attention_heads=2, head_hidden_dim=3)
    )
    s = torch.randn(2, 3, 4, generator=gen)
    u = torch.randn(2, 4, 4, generator=gen)
    s_mask = torch.tensor([[True, True, False], [True, True, True]])
    u_mask = torch.tensor([[True, False, True, False], [True, True, True, True]])

    error = max_gradient_error(bi, [s, s_mask, u, u_mask], seed=1)
    assert error < TOLERANCE, f"bi-encoder relative error {error:.3e}"

    cross = CrossEncoderNet(
        4, CrossEncoderConfig(checkpoint_id="hash-4", adapter_dim=2, head_hidden_dim=3)
    )
    tokens = torch.randn(2, 5, 4, generator=gen)
    mask = torch.tensor([[True, True, True, False, False], [True] * 5])
    error = max_gradient_error(cross, [tokens, mask], seed=2)
    assert error < TOLERANCE, f"cross-encoder relative error {error:.3e}"
