"""Pair externally sourced user prompts with system prompts for evaluation.

External benchmark sets ship as bare user prompts with a known label (for
example, a list of prompts that are all supposed to be flagged). To score
them with F(S, U) each prompt needs a system prompt; we assign one uniformly
at random from a provided pool, seeded for reproducibility.
"""

from __future__ import annotations

import random
from pathlib import Path

from topicguard.core.errors import InputError
from topicguard.core.records import PromptDataset, make_pair

__all__ = ["pair_external", "read_prompt_lines"]


def pair_external(
    prompts: list[str],
    system_prompts: list[str],
    label: int,
    seed: int,
) -> PromptDataset:
    """Pair each external user prompt with a seeded uniform-random system prompt.

    Every resulting pair carries the fixed label and source="external".
    Deterministic for a given (prompts, system_prompts, seed); duplicate
    (system, user) combinations after normalization are dropped, keeping the
    first occurrence.
    """
    if not prompts:
        raise InputError("prompts must be non-empty")
    if not system_prompts:
        raise InputError("system_prompts must be non-empty")
    if label not in (0, 1):
        raise InputError(f"label must be 0 or 1, got {label!r}")

    rng = random.Random(seed)
    pairs = []
    seen: set[str] = set()
    duplicates = 0
    for prompt in prompts:
        pair = make_pair(rng.choice(system_prompts), prompt, label, source="external")
        if pair.pair_id in seen:
            duplicates += 1
            continue
        seen.add(pair.pair_id)
        pairs.append(pair)
    return PromptDataset(
        pairs=tuple(pairs),
        metadata={
            "builder": "pair_external",
            "seed": seed,
            "label": label,
            "n_prompts": len(prompts),
            "n_system_prompts": len(system_prompts),
            "duplicates_dropped": duplicates,
        },
    )


def read_prompt_lines(path: str | Path) -> list[str]:
    """One prompt per line; surrounding whitespace trimmed, blank lines skipped."""
    text = Path(path).read_text(encoding="utf-8")
    prompts = [line.strip() for line in text.splitlines()]
    return [p for p in prompts if p]
