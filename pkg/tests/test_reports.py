"""Evaluation report assembly, serialization, and best-effort plotting."""

import json

import pytest

from topicguard.core import AbstentionError, InputError, PromptDataset, make_pair
from topicguard.evalharness import (
    REPORT_SCHEMA_VERSION,
    evaluate_scorer,
    plot_reliability,
    write_report,
)


class TableScorer:
    """Scores looked up by user prompt; optionally abstains on marked prompts."""

    model_id = "stub:table"

    def __init__(self, table: dict[str, float], abstain_on: set[str] = frozenset()):
        self.table = table
        self.abstain_on = set(abstain_on)

    def predict(self, system_prompt: str, user_prompt: str) -> float:
        if user_prompt in self.abstain_on:
            raise AbstentionError(f"no verdict for {user_prompt!r}")
        return self.table[user_prompt]


def _dataset(rows):
    pairs = tuple(make_pair("You are a scoped assistant.", user, label) for user, label in rows)
    return PromptDataset(pairs=pairs)


MIXED = _dataset(
    [("clearly fine", 0), ("borderline ask", 0), ("drifting ask", 1), ("way off", 1)]
)
MIXED_SCORES = {"clearly fine": 0.1, "borderline ask": 0.4, "drifting ask": 0.7, "way off": 0.95}


class TestEvaluateScorer:
    def test_full_mode_report_contents(self):
        report = evaluate_scorer(TableScorer(MIXED_SCORES), MIXED, threshold=0.5)
        assert report.mode == "full"
        assert report.model_id == "stub:table"
        assert report.dataset_fingerprint == MIXED.fingerprint()
        assert report.n_scored == 4 and report.n_abstained == 0
        assert report.roc_auc == 1.0
        assert (report.precision, report.recall, report.f1) == (1.0, 1.0, 1.0)
        assert len(report.threshold_sweep) == 21
        assert len(report.reliability.bins) == 10

    def test_accepts_plain_pair_sequences(self):
        report = evaluate_scorer(TableScorer(MIXED_SCORES), list(MIXED.pairs))
        assert report.n_scored == 4
        assert report.dataset_fingerprint == MIXED.fingerprint()

    def test_positives_only_set_reports_recall_only(self):
        data = _dataset([("attack one", 1), ("attack two", 1), ("attack three", 1)])
        scorer = TableScorer({"attack one": 0.9, "attack two": 0.8, "attack three": 0.2})
        report = evaluate_scorer(scorer, data, threshold=0.5)
        assert report.mode == "recall_only"
        assert report.roc_auc is None
        assert report.recall == pytest.approx(2 / 3)

    def test_abstentions_are_counted_and_excluded(self):
        scorer = TableScorer(MIXED_SCORES, abstain_on={"borderline ask"})
        report = evaluate_scorer(scorer, MIXED)
        assert report.n_scored == 3
        assert report.n_abstained == 1
        assert report.roc_auc == 1.0

    def test_all_abstentions_rejected(self):
        scorer = TableScorer({}, abstain_on=set(MIXED_SCORES))
        with pytest.raises(InputError):
            evaluate_scorer(scorer, MIXED)

    def test_out_of_range_threshold_rejected(self):
        with pytest.raises(InputError):
            evaluate_scorer(TableScorer(MIXED_SCORES), MIXED, threshold=1.5)

    def test_empty_dataset_rejected(self):
        with pytest.raises(InputError):
            evaluate_scorer(TableScorer({}), [])

    def test_custom_grid_and_bins(self):
        report = evaluate_scorer(TableScorer(MIXED_SCORES), MIXED, n_bins=4, grid=[0.0, 0.5, 1.0])
        assert len(report.threshold_sweep) == 3
        assert len(report.reliability.bins) == 4


class TestReportSerialization:
    def test_write_report_round_trip(self, tmp_path):
        report = evaluate_scorer(TableScorer(MIXED_SCORES), MIXED)
        path = write_report(report, tmp_path / "out" / "report.json")
        payload = json.loads(path.read_text(encoding="utf-8"))
        assert payload["schema_version"] == REPORT_SCHEMA_VERSION
        assert payload["model_id"] == "stub:table"
        assert payload["metrics"]["roc_auc"] == 1.0
        assert len(payload["threshold_sweep"]) == 21
        assert payload["reliability"]["ece"] == pytest.approx(report.reliability.ece)

    def test_serialization_is_byte_stable(self, tmp_path):
        report = evaluate_scorer(TableScorer(MIXED_SCORES), MIXED)
        a = write_report(report, tmp_path / "a.json").read_bytes()
        b = write_report(report, tmp_path / "b.json").read_bytes()
        assert a == b


class TestPlotting:
    def test_plot_written(self, tmp_path):
        report = evaluate_scorer(TableScorer(MIXED_SCORES), MIXED)
        target = tmp_path / "plots" / "calibration.png"
        assert plot_reliability(report, target) is True
        assert target.exists()
        assert target.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_plot_failure_never_raises(self, tmp_path):
        report = evaluate_scorer(TableScorer(MIXED_SCORES), MIXED)
        blocker = tmp_path / "not_a_dir"
        blocker.write_text("occupied", encoding="utf-8")
        target = blocker / "sub" / "calibration.png"
        assert plot_reliability(report, target) is False
