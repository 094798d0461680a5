"""Reference scorers: cosine similarity, few-shot KNN, and a zero-shot judge.

All three expose the same contract as the trained classifiers: a
`predict(system_prompt, user_prompt) -> p in [0, 1]` method plus a `model_id`,
so the evaluation harness treats every method identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from topicguard.core.errors import AbstentionError, InputError
from topicguard.core.records import LabeledPair
from topicguard.classifiers.backbone import TextBackbone
from topicguard.datagen.metaprompt import TEMPLATE_CLOSE, TEMPLATE_OPEN, SamplingParams
from topicguard.datagen.parsing import GenerationParseError, extract_json_payload
from topicguard.datagen.providers import JUDGE_HEADER, ProviderClient, ProviderError, with_retries

# Unit separator: joins S and U into the single query text KNN embeds.
PAIR_JOINER = " ␟ "


def _checked(system_prompt: str, user_prompt: str) -> None:
    if not system_prompt.strip() or not user_prompt.strip():
        raise InputError("both prompts must be non-empty")


def cosine_score(embedder: TextBackbone, system_prompt: str, user_prompt: str) -> tuple[float, float]:
    """(similarity, p): cosine of the two prompt embeddings, mapped to p = (1 - sim) / 2.

    The map is monotone decreasing, so rank-based metrics are unchanged by it.
    """
    _checked(system_prompt, user_prompt)
    e_s = embedder.embed(system_prompt).astype(np.float64)
    e_u = embedder.embed(user_prompt).astype(np.float64)
    norm_s = float(np.linalg.norm(e_s))
    norm_u = float(np.linalg.norm(e_u))
    if norm_s == 0.0 or norm_u == 0.0:
        raise InputError("zero-norm embedding; cosine similarity is undefined")
    similarity = float(np.dot(e_s, e_u) / (norm_s * norm_u))
    similarity = max(-1.0, min(1.0, similarity))
    return similarity, (1.0 - similarity) / 2.0


@dataclass(frozen=True)
class ExemplarSet:
    """Exactly 3 on-topic and 3 off-topic labeled pairs for few-shot KNN."""

    on_topic: tuple[LabeledPair, ...]
    off_topic: tuple[LabeledPair, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "on_topic", tuple(self.on_topic))
        object.__setattr__(self, "off_topic", tuple(self.off_topic))
        if len(self.on_topic) != 3 or len(self.off_topic) != 3:
            raise InputError(
                f"an exemplar set is exactly 3 + 3 pairs, got {len(self.on_topic)} on-topic "
                f"and {len(self.off_topic)} off-topic"
            )
        if any(p.label != 0 for p in self.on_topic):
            raise InputError("on_topic exemplars must carry label 0")
        if any(p.label != 1 for p in self.off_topic):
            raise InputError("off_topic exemplars must carry label 1")

    @property
    def pairs(self) -> tuple[LabeledPair, ...]:
        return self.on_topic + self.off_topic

    @classmethod
    def from_pairs(cls, pairs: list[LabeledPair]) -> "ExemplarSet":
        return cls(
            on_topic=tuple(p for p in pairs if p.label == 0),
            off_topic=tuple(p for p in pairs if p.label == 1),
        )


def _pair_text(system_prompt: str, user_prompt: str) -> str:
    return system_prompt + PAIR_JOINER + user_prompt


def knn_score(
    embedder: TextBackbone,
    exemplars: ExemplarSet,
    system_prompt: str,
    user_prompt: str,
    k: int = 3,
) -> float:
    """Fraction of the k nearest exemplars (cosine distance) that are off-topic.

    The query and each exemplar are embedded as one joined pair text. Distance
    ties break toward off-topic: on exact ambiguity a guardrail over-blocks.
    """
    if k < 1 or k > len(exemplars.pairs) or k % 2 == 0:
        raise InputError(f"k must be a positive odd integer <= 6, got {k}")
    _checked(system_prompt, user_prompt)
    query = embedder.embed(_pair_text(system_prompt, user_prompt)).astype(np.float64)
    query_norm = float(np.linalg.norm(query))
    if query_norm == 0.0:
        raise InputError("zero-norm query embedding")

    ranked = []
    for pair in exemplars.pairs:
        vec = embedder.embed(_pair_text(pair.system_prompt, pair.user_prompt)).astype(np.float64)
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            raise InputError("zero-norm exemplar embedding")
        distance = 1.0 - float(np.dot(query, vec) / (query_norm * norm))
        # Sort key: distance first, then label descending so off-topic wins ties.
        ranked.append((distance, -pair.label))
    ranked.sort()
    nearest = ranked[:k]
    return sum(1 for _, neg_label in nearest if neg_label == -1) / k


def build_judge_prompt(system_prompt: str, user_prompt: str) -> str:
    """The fixed zero-shot judging instruction embedding both prompts."""
    return (
        f"{JUDGE_HEADER}\n\n"
        "Decide whether the user prompt is off-topic for the application whose "
        "system prompt is given below. Off-topic means the request falls outside "
        "the scope the system prompt defines.\n\n"
        f"System prompt:\n{TEMPLATE_OPEN}\n{system_prompt}\n{TEMPLATE_CLOSE}\n\n"
        f"User prompt:\n{TEMPLATE_OPEN}\n{user_prompt}\n{TEMPLATE_CLOSE}\n\n"
        "Reply with STRICT JSON only, exactly one object shaped as\n"
        '{"off_topic": true|false, "confidence": <number between 0 and 1>}'
    )


def zero_shot_llm_score(
    provider: ProviderClient,
    system_prompt: str,
    user_prompt: str,
    attempts: int = 3,
    sleeper=None,
) -> float:
    """Ask an LLM judge for a verdict and map it to p.

    p = confidence when the verdict includes one consistent with the boolean
    (confidence >= 0.5 iff off_topic); otherwise the bare boolean maps to
    1.0/0.0. An unusable verdict after `attempts` tries raises AbstentionError.
    """
    _checked(system_prompt, user_prompt)
    prompt = build_judge_prompt(system_prompt, user_prompt)

    def attempt() -> float:
        raw = provider.complete(prompt, SamplingParams(temperature=0.0))
        verdict = extract_json_payload(raw, "{")
        if not isinstance(verdict, dict) or not isinstance(verdict.get("off_topic"), bool):
            raise GenerationParseError("verdict must be JSON with a boolean off_topic field")
        off_topic = verdict["off_topic"]
        confidence = verdict.get("confidence")
        if isinstance(confidence, (int, float)) and 0.0 <= confidence <= 1.0:
            if (confidence >= 0.5) == off_topic:
                return float(confidence)
        return 1.0 if off_topic else 0.0

    kwargs = {} if sleeper is None else {"sleeper": sleeper}
    try:
        return with_retries(
            attempt,
            attempts=attempts,
            retry_on=(ProviderError, GenerationParseError),
            **kwargs,
        )
    except (ProviderError, GenerationParseError) as exc:
        raise AbstentionError(f"judge gave no usable verdict after {attempts} attempts: {exc}") from exc


# -- uniform scorer objects ---------------------------------------------------


class CosineScorer:
    """predict() wrapper around cosine_score."""

    def __init__(self, embedder: TextBackbone):
        self.embedder = embedder

    @property
    def model_id(self) -> str:
        return f"cosine:{self.embedder.checkpoint_id}"

    def predict(self, system_prompt: str, user_prompt: str) -> float:
        return cosine_score(self.embedder, system_prompt, user_prompt)[1]


class KnnScorer:
    """predict() wrapper around knn_score with a fixed exemplar set."""

    def __init__(self, embedder: TextBackbone, exemplars: ExemplarSet, k: int = 3):
        self.embedder = embedder
        self.exemplars = exemplars
        self.k = k

    @property
    def model_id(self) -> str:
        return f"knn{len(self.exemplars.pairs)}:k={self.k}:{self.embedder.checkpoint_id}"

    def predict(self, system_prompt: str, user_prompt: str) -> float:
        return knn_score(self.embedder, self.exemplars, system_prompt, user_prompt, self.k)


class ZeroShotScorer:
    """predict() wrapper around zero_shot_llm_score."""

    def __init__(self, provider: ProviderClient, attempts: int = 3, sleeper=None):
        self.provider = provider
        self.attempts = attempts
        self.sleeper = sleeper

    @property
    def model_id(self) -> str:
        return f"zeroshot:{self.provider.identity}"

    def predict(self, system_prompt: str, user_prompt: str) -> float:
        return zero_shot_llm_score(
            self.provider, system_prompt, user_prompt, attempts=self.attempts, sleeper=self.sleeper
        )
