"""Frozen text backbones that turn prompts into per-token vectors.

The only backbone shipped here is a deterministic hashing embedder: every
token maps to a fixed pseudo-random unit vector derived from its hash. It
needs no downloads or weights, which keeps the full architecture, training
loop, and artifact format exercisable offline. Real pretrained encoders slot
in behind the same interface via `register_backbone`.
"""

from __future__ import annotations

import hashlib
import re
from abc import ABC, abstractmethod
from functools import lru_cache
from typing import Callable

import numpy as np

from topicguard.core.errors import InputError


class BackboneError(ValueError):
    """A backbone identifier cannot be resolved."""


_TOKEN_SPLIT = re.compile(r"\S+")


def tokenize(text: str) -> list[str]:
    """Whitespace tokenization; the hashing backbone needs nothing smarter."""
    return _TOKEN_SPLIT.findall(text)


class TextBackbone(ABC):
    """Per-token embedding interface. Backbones are frozen: no gradients."""

    @property
    @abstractmethod
    def checkpoint_id(self) -> str:
        """Identifier stored in model artifacts and resolved on load."""

    @property
    @abstractmethod
    def hidden_dim(self) -> int:
        """Dimensionality of every token vector."""

    @property
    @abstractmethod
    def max_tokens(self) -> int:
        """Hard token limit; callers truncate to at most this many tokens."""

    @abstractmethod
    def token_vectors(self, tokens: list[str]) -> np.ndarray:
        """Map a token sequence to a float32 array of shape (len(tokens), hidden_dim)."""

    def encode(self, text: str, limit: int | None = None) -> np.ndarray:
        """Token vectors for `text`, truncated to min(limit, max_tokens) tokens."""
        tokens = tokenize(text)
        if not tokens:
            raise InputError("cannot encode an empty prompt")
        cap = self.max_tokens if limit is None else min(limit, self.max_tokens)
        return self.token_vectors(tokens[:cap])

    def embed(self, text: str) -> np.ndarray:
        """Single-vector representation: the mean of the token vectors."""
        return self.encode(text).mean(axis=0)


@lru_cache(maxsize=65536)
def _hash_vector(token: str, dim: int) -> np.ndarray:
    seed = int.from_bytes(hashlib.sha256(token.encode("utf-8")).digest()[:8], "big")
    vec = np.random.default_rng(seed).standard_normal(dim).astype(np.float32)
    vec /= np.linalg.norm(vec)
    vec.setflags(write=False)
    return vec


class HashingBackbone(TextBackbone):
    """Deterministic stub: token -> unit Gaussian vector seeded by the token's hash.

    Case-insensitive on purpose, so surface-casing variants of a word share a
    vector. Identity scheme: "hash-{dim}".
    """

    def __init__(self, dim: int = 64, max_tokens: int = 8192):
        if dim < 1 or max_tokens < 1:
            raise BackboneError("hash backbone needs positive dim and max_tokens")
        self._dim = dim
        self._max_tokens = max_tokens

    @property
    def checkpoint_id(self) -> str:
        return f"hash-{self._dim}"

    @property
    def hidden_dim(self) -> int:
        return self._dim

    @property
    def max_tokens(self) -> int:
        return self._max_tokens

    def token_vectors(self, tokens: list[str]) -> np.ndarray:
        if not tokens:
            raise InputError("cannot encode an empty token sequence")
        return np.stack([_hash_vector(t.lower(), self._dim) for t in tokens])


_FACTORIES: dict[str, Callable[[str], TextBackbone]] = {}


def register_backbone(prefix: str, factory: Callable[[str], TextBackbone]) -> None:
    """Register a loader for checkpoint ids of the form `{prefix}-...`."""
    _FACTORIES[prefix] = factory


def _build_hash(checkpoint_id: str) -> TextBackbone:
    try:
        dim = int(checkpoint_id.split("-", 1)[1])
    except (IndexError, ValueError) as exc:
        raise BackboneError(f"bad hash backbone id {checkpoint_id!r}; expected 'hash-<dim>'") from exc
    return HashingBackbone(dim=dim)


register_backbone("hash", _build_hash)


def resolve_backbone(checkpoint_id: str) -> TextBackbone:
    """Instantiate the backbone named by `checkpoint_id` (e.g. "hash-64")."""
    prefix = checkpoint_id.split("-", 1)[0]
    factory = _FACTORIES.get(prefix)
    if factory is None:
        raise BackboneError(
            f"no backbone registered for {checkpoint_id!r}; known prefixes: "
            + ", ".join(sorted(_FACTORIES))
        )
    return factory(checkpoint_id)
