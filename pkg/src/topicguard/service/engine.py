"""Decision engine: threshold rule, optional two-stage cascade, atomic config.

The scoring rule is shared with the evaluation harness: a prompt is flagged
off-topic when p >= threshold (inclusive boundary). The optional cascade runs
a second, slower model whenever the primary's probability falls strictly
inside an uncertainty band; the second opinion then replaces the first.
"""

from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass
from typing import Protocol

from topicguard.core.errors import InputError, ScoringError

__all__ = [
    "CascadeConfig",
    "GuardrailDecision",
    "ModelNotLoadedError",
    "ServiceState",
    "decide",
]

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.5
DEFAULT_UNCERTAINTY_BAND = (0.35, 0.65)

STAGES = ("bi_only", "cross_confirmed", "cross_overridden", "none")


class ModelNotLoadedError(ScoringError):
    """Raised when scoring is requested before any model is available."""


class Scorer(Protocol):
    model_id: str

    def predict(self, system_prompt: str, user_prompt: str) -> float: ...


@dataclass(frozen=True)
class CascadeConfig:
    """Primary scorer plus an optional banded re-check by a secondary scorer."""

    primary_model: Scorer
    secondary_model: Scorer | None = None
    enabled: bool = False
    uncertainty_band: tuple[float, float] = DEFAULT_UNCERTAINTY_BAND

    def __post_init__(self) -> None:
        object.__setattr__(self, "uncertainty_band", tuple(self.uncertainty_band))
        if self.primary_model is None:
            raise ModelNotLoadedError("cascade requires a primary model")
        if self.enabled:
            if self.secondary_model is None:
                raise InputError("cascade enabled but no secondary model configured")
            low, high = self.uncertainty_band
            if not (0.0 <= low < high <= 1.0):
                raise InputError(
                    f"uncertainty band must satisfy 0 <= low < high <= 1, got ({low}, {high})"
                )


@dataclass(frozen=True)
class GuardrailDecision:
    """One scoring outcome; off_topic always equals (p >= threshold)."""

    p: float
    off_topic: bool
    threshold: float
    model_id: str
    cascade_stage: str

    def __post_init__(self) -> None:
        if self.cascade_stage not in STAGES:
            raise InputError(f"unknown cascade stage {self.cascade_stage!r}")
        if self.off_topic != (self.p >= self.threshold):
            raise ScoringError("decision violates the off_topic = (p >= threshold) rule")

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "off_topic": self.off_topic,
            "threshold": self.threshold,
            "model_id": self.model_id,
            "cascade_stage": self.cascade_stage,
        }


def _primary_stage(model: Scorer) -> str:
    # The canonical fast path is a bi-encoder; any other single-model setup
    # reports no cascade stage at all.
    kind = getattr(model, "kind", None)
    if kind == "bi_encoder" or str(getattr(model, "model_id", "")).startswith("bi_encoder"):
        return "bi_only"
    return "none"


def decide(
    system_prompt: str,
    user_prompt: str,
    threshold: float,
    cascade: CascadeConfig,
) -> GuardrailDecision:
    """Score one (S, U) pair under a fixed threshold and cascade configuration."""
    if not 0.0 <= threshold <= 1.0:
        raise InputError(f"threshold must be in [0, 1], got {threshold}")
    if not str(system_prompt).strip() or not str(user_prompt).strip():
        raise InputError("both prompts must be non-empty")

    started = time.monotonic()
    primary = cascade.primary_model
    p = float(primary.predict(system_prompt, user_prompt))
    model_id = primary.model_id
    stage = _primary_stage(primary)

    if cascade.enabled and cascade.secondary_model is not None:
        low, high = cascade.uncertainty_band
        if low < p < high:
            tentative = p >= threshold
            secondary = cascade.secondary_model
            p = float(secondary.predict(system_prompt, user_prompt))
            model_id = secondary.model_id
            stage = "cross_confirmed" if (p >= threshold) == tentative else "cross_overridden"

    decision = GuardrailDecision(
        p=p,
        off_topic=p >= threshold,
        threshold=threshold,
        model_id=model_id,
        cascade_stage=stage,
    )
    logger.info(
        "scored stage=%s off_topic=%s p=%.4f t=%.2f latency_ms=%.1f",
        decision.cascade_stage,
        decision.off_topic,
        decision.p,
        decision.threshold,
        (time.monotonic() - started) * 1000,
    )
    return decision


class ServiceState:
    """Shared mutable service configuration with atomic threshold swaps.

    Models are immutable once loaded; the only mutable piece is the threshold.
    Each request snapshots it once, so a concurrent reload never produces a
    response whose (p, threshold, off_topic) triple is internally inconsistent.
    """

    def __init__(
        self,
        cascade: CascadeConfig | None,
        threshold: float = DEFAULT_THRESHOLD,
    ):
        if not 0.0 <= threshold <= 1.0:
            raise InputError(f"threshold must be in [0, 1], got {threshold}")
        self._cascade = cascade
        self._threshold = float(threshold)
        self._lock = threading.Lock()

    @property
    def cascade(self) -> CascadeConfig | None:
        return self._cascade

    @property
    def threshold(self) -> float:
        with self._lock:
            return self._threshold

    def reload_threshold(self, new_threshold: float) -> tuple[float, float]:
        """Swap the live threshold; returns (previous, current).

        Out-of-range values are rejected and the previous threshold is kept.
        """
        value = float(new_threshold)
        if not 0.0 <= value <= 1.0:
            raise InputError(f"threshold must be in [0, 1], got {new_threshold}")
        with self._lock:
            previous = self._threshold
            self._threshold = value
        logger.info("threshold reloaded %.3f -> %.3f", previous, value)
        return previous, value

    def score(self, system_prompt: str, user_prompt: str) -> GuardrailDecision:
        if self._cascade is None:
            raise ModelNotLoadedError("no model loaded")
        return decide(system_prompt, user_prompt, self.threshold, self._cascade)
