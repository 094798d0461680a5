"""Versioned evaluation reports: run any scorer over a dataset, summarize, plot.

A "scorer" is anything with `model_id` and `predict(system_prompt, user_prompt)
-> p in [0, 1]`: trained classifiers, the reference baselines, or a stub. The
report bundles ranking quality, thresholded metrics, a threshold sweep, and
calibration into one JSON-serializable object stamped with the dataset
fingerprint so results can be traced back to their inputs.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from topicguard.core.errors import AbstentionError, InputError
from topicguard.core.records import LabeledPair, PromptDataset
from topicguard.evalharness.metrics import (
    DEFAULT_THRESHOLD_GRID,
    ReliabilityReport,
    ScoredSet,
    precision_recall_f1,
    reliability,
    roc_auc,
    sweep_thresholds,
)

__all__ = ["REPORT_SCHEMA_VERSION", "EvalReport", "evaluate_scorer", "write_report", "plot_reliability"]

logger = logging.getLogger(__name__)

REPORT_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class EvalReport:
    """Metrics for one scorer on one dataset.

    `roc_auc` is None in recall-only mode (single-class data, typically an
    external positives-only set where only the detection rate is meaningful).
    """

    model_id: str
    dataset_fingerprint: str
    mode: str  # "full" or "recall_only"
    threshold: float
    n_scored: int
    n_abstained: int
    roc_auc: float | None
    precision: float
    recall: float
    f1: float
    threshold_sweep: tuple[dict, ...]
    reliability: ReliabilityReport

    def to_dict(self) -> dict:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "model_id": self.model_id,
            "dataset_fingerprint": self.dataset_fingerprint,
            "mode": self.mode,
            "threshold": self.threshold,
            "n_scored": self.n_scored,
            "n_abstained": self.n_abstained,
            "metrics": {
                "roc_auc": self.roc_auc,
                "precision": self.precision,
                "recall": self.recall,
                "f1": self.f1,
            },
            "threshold_sweep": list(self.threshold_sweep),
            "reliability": self.reliability.to_dict(),
        }


def _as_pairs(data: PromptDataset | Sequence[LabeledPair]) -> tuple[tuple[LabeledPair, ...], str]:
    if isinstance(data, PromptDataset):
        return data.pairs, data.fingerprint()
    pairs = tuple(data)
    return pairs, PromptDataset(pairs=pairs).fingerprint()


def evaluate_scorer(
    scorer,
    data: PromptDataset | Sequence[LabeledPair],
    threshold: float = 0.5,
    n_bins: int = 10,
    grid: Sequence[float] | None = None,
) -> EvalReport:
    """Score every pair, tolerate abstentions, and compute the full metric set.

    Scorers may abstain per pair (the zero-shot judge does after exhausting
    retries); abstained pairs are counted and excluded from the metrics. A set
    where every pair abstains is an error.
    """
    pairs, fingerprint = _as_pairs(data)
    if not pairs:
        raise InputError("cannot evaluate on an empty dataset")
    if not 0.0 <= threshold <= 1.0:
        raise InputError(f"threshold must be in [0, 1], got {threshold}")

    scores, labels = [], []
    abstained = 0
    for pair in pairs:
        try:
            scores.append(float(scorer.predict(pair.system_prompt, pair.user_prompt)))
            labels.append(pair.label)
        except AbstentionError:
            abstained += 1
    if not scores:
        raise InputError("scorer abstained on every pair; nothing to evaluate")

    scored = ScoredSet(scores=tuple(scores), labels=tuple(labels))
    single_class = scored.n_positive == 0 or scored.n_negative == 0
    precision, recall, f1 = precision_recall_f1(scored, threshold)
    return EvalReport(
        model_id=scorer.model_id,
        dataset_fingerprint=fingerprint,
        mode="recall_only" if single_class else "full",
        threshold=threshold,
        n_scored=len(scores),
        n_abstained=abstained,
        roc_auc=None if single_class else roc_auc(scored),
        precision=precision,
        recall=recall,
        f1=f1,
        threshold_sweep=tuple(sweep_thresholds(scored, grid)),
        reliability=reliability(scored, n_bins=n_bins),
    )


def write_report(report: EvalReport, path: str | Path) -> Path:
    """Serialize the report as stable, human-diffable JSON."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def plot_reliability(report: EvalReport, path: str | Path) -> bool:
    """Write a calibration plot image; returns False (and logs) on any failure.

    Plotting is best-effort decoration for reports: a headless or broken
    matplotlib install must never fail an evaluation run.
    """
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        occupied = [b for b in report.reliability.bins if b.count > 0]
        centers = [b.mean_predicted for b in occupied]
        freqs = [b.empirical_frequency for b in occupied]
        fig, ax = plt.subplots(figsize=(4.5, 4.5))
        ax.plot([0, 1], [0, 1], linestyle="--", color="gray", label="perfectly calibrated")
        ax.plot(centers, freqs, marker="o", color="tab:blue", label=report.model_id)
        ax.set_xlabel("mean predicted off-topic probability")
        ax.set_ylabel("empirical off-topic frequency")
        ax.set_xlim(0, 1)
        ax.set_ylim(0, 1)
        ax.set_title(f"ECE = {report.reliability.ece:.4f}")
        ax.legend(loc="upper left", fontsize=8)
        fig.tight_layout()
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, dpi=120)
        plt.close(fig)
        return True
    except Exception as exc:  # matplotlib failures must not fail evaluation
        logger.warning("reliability plot skipped: %s", exc)
        return False
