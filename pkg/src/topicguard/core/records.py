"""Labeled prompt-pair records and the dataset container built from them.

A record is a (system prompt, user prompt, label) triple where label 1 means
the user prompt is off-topic for the system prompt. Records are identified by
a content hash computed after whitespace normalization, which is what the
dedup guarantee rests on.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

SOURCES = ("synthetic", "external", "manual")

_WS_RUN = re.compile(r"\s+")

# Normalized prompts contain no newline, so this delimiter cannot occur inside
# either side of the hashed payload.
_PAIR_ID_DELIMITER = "\n\x1f\n"


class PairValidationError(ValueError):
    """A raw record cannot be turned into a valid LabeledPair."""


class DatasetError(ValueError):
    """A PromptDataset invariant is violated."""


def normalize_prompt(text: str) -> str:
    """Trim and collapse whitespace runs to single spaces, preserving case."""
    return _WS_RUN.sub(" ", text).strip()


def pair_id_for(system_prompt: str, user_prompt: str) -> str:
    """Content hash (128-bit hex) of the normalized (S, U) pair."""
    payload = (
        normalize_prompt(system_prompt)
        + _PAIR_ID_DELIMITER
        + normalize_prompt(user_prompt)
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:32]


@dataclass(frozen=True)
class LabeledPair:
    """One (system prompt, user prompt, label) training or evaluation record.

    Prompts are stored in normalized form and `pair_id` is derived from them,
    so building instances through `make_pair` or `validate_pair` keeps the
    hash consistent with the content.
    """

    system_prompt: str
    user_prompt: str
    label: int
    source: str = "synthetic"
    generator_id: str | None = None
    pair_id: str = ""

    def to_dict(self) -> dict[str, Any]:
        record: dict[str, Any] = {
            "system_prompt": self.system_prompt,
            "user_prompt": self.user_prompt,
            "label": self.label,
            "source": self.source,
        }
        if self.generator_id is not None:
            record["generator_id"] = self.generator_id
        return record


def make_pair(
    system_prompt: str,
    user_prompt: str,
    label: int,
    source: str = "synthetic",
    generator_id: str | None = None,
) -> LabeledPair:
    """Normalize prompts, validate fields, and compute the pair id."""
    system_prompt = normalize_prompt(str(system_prompt))
    user_prompt = normalize_prompt(str(user_prompt))
    if not system_prompt:
        raise PairValidationError("empty system prompt")
    if not user_prompt:
        raise PairValidationError("empty user prompt")
    if label not in (0, 1):
        raise PairValidationError(f"label must be 0 or 1, got {label!r}")
    if source not in SOURCES:
        raise PairValidationError(f"unknown source {source!r}")
    return LabeledPair(
        system_prompt=system_prompt,
        user_prompt=user_prompt,
        label=int(label),
        source=source,
        generator_id=generator_id,
        pair_id=pair_id_for(system_prompt, user_prompt),
    )


def _parse_label(raw: Any) -> int:
    if isinstance(raw, bool):
        return int(raw)
    if isinstance(raw, int) and raw in (0, 1):
        return raw
    if isinstance(raw, float) and raw in (0.0, 1.0):
        return int(raw)
    if isinstance(raw, str):
        lowered = raw.strip().lower()
        if lowered in ("0", "false"):
            return 0
        if lowered in ("1", "true"):
            return 1
    raise PairValidationError(f"label is not a binary value: {raw!r}")


def validate_pair(raw: Mapping[str, Any]) -> LabeledPair:
    """Build a normalized LabeledPair from a raw record.

    Accepts `label` as 0/1 integers, booleans, or their string forms. Raises
    PairValidationError on empty prompts or anything else unparsable.
    """
    missing = [key for key in ("system_prompt", "user_prompt", "label") if key not in raw]
    if missing:
        raise PairValidationError(f"missing required fields: {', '.join(missing)}")
    return make_pair(
        system_prompt=str(raw["system_prompt"]),
        user_prompt=str(raw["user_prompt"]),
        label=_parse_label(raw["label"]),
        source=raw.get("source", "synthetic"),
        generator_id=raw.get("generator_id"),
    )


def deduplicate(pairs: Iterable[LabeledPair]) -> list[LabeledPair]:
    """Drop pairs with an already-seen pair_id; first occurrence wins."""
    seen: set[str] = set()
    unique: list[LabeledPair] = []
    for pair in pairs:
        if pair.pair_id in seen:
            continue
        seen.add(pair.pair_id)
        unique.append(pair)
    return unique


@dataclass(frozen=True)
class PromptDataset:
    """Deduplicated collection of LabeledPair with optional split assignments.

    Immutable after construction; operations that change membership or splits
    return a new dataset. `split_assignment` maps pair_id to one of
    train/val/test; unassigned pairs are allowed.
    """

    pairs: tuple[LabeledPair, ...]
    split_assignment: Mapping[str, str] = field(default_factory=dict)
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "pairs", tuple(self.pairs))
        object.__setattr__(self, "split_assignment", dict(self.split_assignment))
        object.__setattr__(self, "metadata", dict(self.metadata))
        seen: set[str] = set()
        for pair in self.pairs:
            expected = pair_id_for(pair.system_prompt, pair.user_prompt)
            if pair.pair_id != expected:
                raise DatasetError(
                    f"pair_id {pair.pair_id!r} does not match pair content"
                )
            if pair.pair_id in seen:
                raise DatasetError(f"duplicate pair_id {pair.pair_id!r}")
            seen.add(pair.pair_id)
        for pid, split in self.split_assignment.items():
            if pid not in seen:
                raise DatasetError(f"split assignment references unknown pair_id {pid!r}")
            if split not in ("train", "val", "test"):
                raise DatasetError(f"unknown split name {split!r}")

    def __len__(self) -> int:
        return len(self.pairs)

    def label_counts(self) -> dict[int, int]:
        counts = {0: 0, 1: 0}
        for pair in self.pairs:
            counts[pair.label] += 1
        return counts

    def split(self, name: str) -> tuple[LabeledPair, ...]:
        """Pairs assigned to the given split, in dataset order."""
        return tuple(
            pair for pair in self.pairs if self.split_assignment.get(pair.pair_id) == name
        )

    def fingerprint(self) -> str:
        """Stable hash over the set of pair ids, order-insensitive."""
        digest = hashlib.sha256()
        for pid in sorted(pair.pair_id for pair in self.pairs):
            digest.update(pid.encode("ascii"))
        return digest.hexdigest()[:16]
