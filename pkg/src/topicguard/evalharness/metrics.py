"""Threshold-free and thresholded classification metrics plus calibration.

Conventions used throughout the package:
- The decision rule is p >= t (inclusive), here and in the service.
- ROC-AUC follows the Mann-Whitney formulation: the probability that a random
  positive outranks a random negative, with ties counting one half.
- Degenerate precision/recall cases are defined, not errors: precision is 1
  when nothing was flagged and nothing was missed, 0 when nothing was flagged
  but positives exist; recall is 1 when there are no positives; F1 is 0 when
  precision + recall is 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class MetricError(ValueError):
    """Metric inputs violate a precondition (e.g. single-class ROC-AUC)."""


@dataclass(frozen=True)
class ScoredSet:
    """Aligned probabilities and binary labels."""

    scores: tuple[float, ...]
    labels: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "scores", tuple(float(s) for s in self.scores))
        object.__setattr__(self, "labels", tuple(int(y) for y in self.labels))
        if len(self.scores) != len(self.labels):
            raise MetricError(
                f"scores ({len(self.scores)}) and labels ({len(self.labels)}) differ in length"
            )
        if not self.scores:
            raise MetricError("a scored set cannot be empty")
        for s in self.scores:
            if not math.isfinite(s) or not 0.0 <= s <= 1.0:
                raise MetricError(f"score {s!r} is outside [0, 1]")
        for y in self.labels:
            if y not in (0, 1):
                raise MetricError(f"label {y!r} is not 0 or 1")

    def __len__(self) -> int:
        return len(self.scores)

    @property
    def n_positive(self) -> int:
        return sum(self.labels)

    @property
    def n_negative(self) -> int:
        return len(self.labels) - self.n_positive


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties sharing their average rank."""
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def roc_auc(scored: ScoredSet) -> float:
    """P(random positive scores above random negative), ties counting 1/2."""
    n_pos, n_neg = scored.n_positive, scored.n_negative
    if n_pos == 0 or n_neg == 0:
        raise MetricError("ROC-AUC needs both classes present")
    scores = np.asarray(scored.scores, dtype=np.float64)
    labels = np.asarray(scored.labels)
    ranks = _average_ranks(scores)
    positive_rank_sum = float(ranks[labels == 1].sum())
    return (positive_rank_sum - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg)


def precision_recall_f1(scored: ScoredSet, threshold: float) -> tuple[float, float, float]:
    """Confusion-matrix metrics under the p >= threshold decision rule."""
    tp = fp = fn = 0
    for score, label in zip(scored.scores, scored.labels):
        flagged = score >= threshold
        if flagged and label == 1:
            tp += 1
        elif flagged and label == 0:
            fp += 1
        elif not flagged and label == 1:
            fn += 1
    if tp + fp == 0:
        precision = 1.0 if fn == 0 else 0.0
    else:
        precision = tp / (tp + fp)
    recall = 1.0 if tp + fn == 0 else tp / (tp + fn)
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return precision, recall, f1


@dataclass(frozen=True)
class ReliabilityBin:
    """One calibration bin; mean/frequency are None when the bin is empty."""

    lower: float
    upper: float
    mean_predicted: float | None
    empirical_frequency: float | None
    count: int

    def to_dict(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "mean_predicted": self.mean_predicted,
            "empirical_frequency": self.empirical_frequency,
            "count": self.count,
        }


@dataclass(frozen=True)
class ReliabilityReport:
    bins: tuple[ReliabilityBin, ...]
    ece: float

    def to_dict(self) -> dict:
        return {"bins": [b.to_dict() for b in self.bins], "ece": self.ece}


def reliability(scored: ScoredSet, n_bins: int = 10) -> ReliabilityReport:
    """Equal-width calibration bins over [0, 1] and their expected calibration error.

    Bins are [lower, upper) except the last, whose upper edge 1.0 is included.
    ECE = sum over occupied bins of (count/N) * |mean_predicted - frequency|.
    """
    if n_bins < 1:
        raise MetricError(f"n_bins must be >= 1, got {n_bins}")
    edges = [i / n_bins for i in range(n_bins + 1)]
    sums = [0.0] * n_bins
    positives = [0] * n_bins
    counts = [0] * n_bins
    for score, label in zip(scored.scores, scored.labels):
        idx = n_bins - 1
        for b in range(n_bins):
            if score < edges[b + 1]:
                idx = b
                break
        sums[idx] += score
        positives[idx] += label
        counts[idx] += 1

    bins = []
    ece = 0.0
    total = len(scored)
    for b in range(n_bins):
        if counts[b] == 0:
            bins.append(ReliabilityBin(edges[b], edges[b + 1], None, None, 0))
            continue
        mean_pred = sums[b] / counts[b]
        freq = positives[b] / counts[b]
        ece += (counts[b] / total) * abs(mean_pred - freq)
        bins.append(ReliabilityBin(edges[b], edges[b + 1], mean_pred, freq, counts[b]))
    return ReliabilityReport(bins=tuple(bins), ece=ece)


DEFAULT_THRESHOLD_GRID = tuple(i / 20 for i in range(21))


def sweep_thresholds(
    scored: ScoredSet, grid: Sequence[float] | None = None
) -> list[dict[str, float]]:
    """Per-threshold precision/recall/F1 rows; recall is weakly decreasing in t."""
    thresholds = DEFAULT_THRESHOLD_GRID if grid is None else tuple(grid)
    if any(b < a for a, b in zip(thresholds, thresholds[1:])):
        raise MetricError("threshold grid must be sorted ascending")
    rows = []
    for t in thresholds:
        precision, recall, f1 = precision_recall_f1(scored, t)
        rows.append({"threshold": t, "precision": precision, "recall": recall, "f1": f1})
    return rows
