"""Errors shared across scoring surfaces."""

from __future__ import annotations


class InputError(ValueError):
    """A caller-supplied prompt or parameter is unusable (maps to HTTP 422)."""


class ScoringError(RuntimeError):
    """A scorer could not produce a probability for a pair."""


class AbstentionError(ScoringError):
    """A scorer gave up on a pair after retries; evaluation records it, never coerces it."""
