"""Deterministic, label-stratified train/val/test splitting.

Each label class is apportioned to splits independently with largest-remainder
rounding, so per-split label balance tracks the overall balance as closely as
the sizes allow. Fractional-remainder ties are broken by a per-class rotation
over the split order, which spreads single leftover examples across splits
instead of piling them onto the first one.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from topicguard.core.records import PromptDataset

SPLIT_NAMES = ("train", "val", "test")


class SplitError(ValueError):
    """Requested split is impossible or would produce an unusable dataset."""


@dataclass(frozen=True)
class SplitRatios:
    train: float
    val: float
    test: float

    def __post_init__(self) -> None:
        for name, value in zip(SPLIT_NAMES, self.as_tuple()):
            if not 0.0 <= value <= 1.0:
                raise SplitError(f"{name} ratio {value} outside [0, 1]")
        if abs(sum(self.as_tuple()) - 1.0) > 1e-9:
            raise SplitError(f"ratios must sum to 1, got {sum(self.as_tuple())!r}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.train, self.val, self.test)


def _apportion(count: int, ratios: tuple[float, ...], rotation: int) -> list[int]:
    """Largest-remainder apportionment of `count` items across the ratios."""
    quotas = [ratio * count for ratio in ratios]
    base = [math.floor(quota) for quota in quotas]
    leftover = count - sum(base)
    order = sorted(
        range(len(ratios)),
        key=lambda idx: (-(quotas[idx] - base[idx]), (idx + rotation) % len(ratios)),
    )
    for idx in order[:leftover]:
        base[idx] += 1
    return base


def split_dataset(dataset: PromptDataset, ratios: SplitRatios, seed: int) -> PromptDataset:
    """Assign every pair to train/val/test, stratified on the label.

    The same (dataset, ratios, seed) always produces the same assignment.
    Raises SplitError when a split with a nonzero ratio would end up empty,
    since such a split cannot hold an example of any class.
    """
    if not dataset.pairs:
        raise SplitError("cannot split an empty dataset")

    rng = random.Random(seed)
    by_label: dict[int, list[str]] = {}
    for pair in dataset.pairs:
        by_label.setdefault(pair.label, []).append(pair.pair_id)

    ratio_values = ratios.as_tuple()
    assignment: dict[str, str] = {}
    totals = [0, 0, 0]
    for rotation, label in enumerate(sorted(by_label)):
        ids = by_label[label]
        rng.shuffle(ids)
        counts = _apportion(len(ids), ratio_values, rotation)
        cursor = 0
        for split_idx, split_name in enumerate(SPLIT_NAMES):
            for pid in ids[cursor : cursor + counts[split_idx]]:
                assignment[pid] = split_name
            cursor += counts[split_idx]
            totals[split_idx] += counts[split_idx]

    for split_idx, split_name in enumerate(SPLIT_NAMES):
        if ratio_values[split_idx] > 0.0 and totals[split_idx] == 0:
            raise SplitError(
                f"split {split_name!r} has ratio {ratio_values[split_idx]} but would "
                f"receive zero examples; dataset of {len(dataset)} is too small"
            )

    return PromptDataset(
        pairs=dataset.pairs,
        split_assignment=assignment,
        metadata=dict(dataset.metadata),
    )
