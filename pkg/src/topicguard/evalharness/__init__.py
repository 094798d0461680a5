"""Metrics, calibration, threshold sweeps, external pairing, and reports."""

from topicguard.evalharness.metrics import (
    DEFAULT_THRESHOLD_GRID,
    MetricError,
    ReliabilityBin,
    ReliabilityReport,
    ScoredSet,
    precision_recall_f1,
    reliability,
    roc_auc,
    sweep_thresholds,
)
from topicguard.evalharness.pairing import pair_external, read_prompt_lines
from topicguard.evalharness.reports import (
    REPORT_SCHEMA_VERSION,
    EvalReport,
    evaluate_scorer,
    plot_reliability,
    write_report,
)

__all__ = [
    "DEFAULT_THRESHOLD_GRID",
    "MetricError",
    "ReliabilityBin",
    "ReliabilityReport",
    "ScoredSet",
    "precision_recall_f1",
    "reliability",
    "roc_auc",
    "sweep_thresholds",
    "pair_external",
    "read_prompt_lines",
    "REPORT_SCHEMA_VERSION",
    "EvalReport",
    "evaluate_scorer",
    "plot_reliability",
    "write_report",
]
