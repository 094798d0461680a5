import json
import re

import pytest

from topicguard.core import write_dataset
from topicguard.datagen import (
    GenerationCampaign,
    MetaPromptError,
    MockProvider,
    ProviderError,
    SamplingParams,
    default_campaign,
    load_campaign,
    run_campaign,
)
from topicguard.datagen.providers import ProviderClient


def _noop(_delay: float) -> None:
    return None


def _batch_tag(prompt: str) -> str:
    match = re.search(r"Batch reference: (\d+)", prompt)
    assert match is not None
    return match.group(1)


class FixedPayloadProvider(ProviderClient):
    """Returns the same four records on every call, whatever the prompt."""

    @property
    def identity(self) -> str:
        return "fixed"

    def complete(self, prompt: str, params: SamplingParams) -> str:
        return json.dumps(
            [
                {"system_prompt": "s", "user_prompt": "alpha", "off_topic": False},
                {"system_prompt": "s", "user_prompt": "beta", "off_topic": False},
                {"system_prompt": "s", "user_prompt": "gamma", "off_topic": True},
                {"system_prompt": "s", "user_prompt": "delta", "off_topic": True},
            ]
        )


class SkewedProvider(ProviderClient):
    """Unique per batch, but three off-topic records for each on-topic one."""

    @property
    def identity(self) -> str:
        return "skewed"

    def complete(self, prompt: str, params: SamplingParams) -> str:
        tag = _batch_tag(prompt)
        records = [{"system_prompt": "s", "user_prompt": f"on {tag}", "off_topic": False}]
        records += [
            {"system_prompt": "s", "user_prompt": f"off {tag} {j}", "off_topic": True} for j in range(3)
        ]
        return json.dumps(records)


class DownProvider(ProviderClient):
    @property
    def identity(self) -> str:
        return "down"

    def complete(self, prompt: str, params: SamplingParams) -> str:
        raise ProviderError("unreachable endpoint")


def _small_campaign(**overrides) -> GenerationCampaign:
    base = default_campaign(target_total=40, pairs_per_request=4, seed=5)
    merged = {**base.to_dict(), **overrides}
    return GenerationCampaign.from_dict(merged)


def test_mock_campaign_reaches_target_balanced_and_deduplicated():
    dataset = run_campaign(_small_campaign(), MockProvider(seed=5), sleeper=_noop)
    assert len(dataset.pairs) >= 40
    counts = dataset.label_counts()
    frac = counts[1] / len(dataset.pairs)
    assert abs(frac - 0.5) <= 0.05
    assert "shortfall" not in dataset.metadata
    assert all(p.generator_id == "mock" for p in dataset.pairs)
    assert all(p.source == "synthetic" for p in dataset.pairs)
    ids = [p.pair_id for p in dataset.pairs]
    assert len(set(ids)) == len(ids)


def test_mock_campaign_is_byte_deterministic(tmp_path):
    first = run_campaign(_small_campaign(), MockProvider(seed=5), sleeper=_noop)
    second = run_campaign(_small_campaign(), MockProvider(seed=5), sleeper=_noop)
    path_a, path_b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    write_dataset(first, path_a)
    write_dataset(second, path_b)
    assert path_a.read_bytes() == path_b.read_bytes()
    assert (tmp_path / "a.jsonl.meta.json").read_bytes() == (tmp_path / "b.jsonl.meta.json").read_bytes()


def test_repeating_provider_hits_request_cap_and_reports_shortfall():
    dataset = run_campaign(_small_campaign(), FixedPayloadProvider(), sleeper=_noop)
    assert len(dataset.pairs) == 4
    gen = dataset.metadata["generation"]
    assert gen["requests_issued"] == 30
    assert gen["request_cap"] == 30
    assert gen["duplicates_dropped"] == 29 * 4
    shortfall = dataset.metadata["shortfall"]
    assert shortfall["reason"] == "request_cap"
    assert shortfall["collected"] == 4
    assert shortfall["target_total"] == 40


def test_unreachable_provider_aborts_after_consecutive_failures():
    sleeps: list[float] = []
    dataset = run_campaign(_small_campaign(), DownProvider(), sleeper=sleeps.append)
    assert len(dataset.pairs) == 0
    assert dataset.metadata["shortfall"]["reason"] == "consecutive_failures"
    gen = dataset.metadata["generation"]
    assert gen["failed_requests"] == 5
    assert gen["requests_issued"] < gen["request_cap"]
    # Each failed request sleeps 1, 2, 4, 8 seconds between its five attempts.
    assert sorted(set(sleeps)) == [1.0, 2.0, 4.0, 8.0]


def test_skewed_provider_is_trimmed_back_to_balance():
    campaign = _small_campaign(target_total=8, pairs_per_request=4)
    dataset = run_campaign(campaign, SkewedProvider(), sleeper=_noop)
    counts = dataset.label_counts()
    frac = counts[1] / len(dataset.pairs)
    assert abs(frac - 0.5) <= 0.05
    gen = dataset.metadata["generation"]
    assert gen["requests_issued"] == 6
    assert gen["balance_trimmed"] == 11
    assert len(dataset.pairs) == 13
    assert "shortfall" not in dataset.metadata
    # Trimming removes the newest majority-label pairs first.
    kept_off = [p.user_prompt for p in dataset.pairs if p.label == 1]
    assert all(tag in ("0001", "0002", "0003") for tag in (u.split()[1] for u in kept_off))


def test_single_request_campaign():
    campaign = _small_campaign(target_total=4, pairs_per_request=4, concurrency=1)
    dataset = run_campaign(campaign, MockProvider(seed=1), sleeper=_noop)
    assert len(dataset.pairs) == 4
    assert dataset.metadata["generation"]["requests_issued"] == 1


def test_campaign_round_trips_through_config_file(tmp_path):
    campaign = default_campaign(target_total=100, pairs_per_request=10)
    path = tmp_path / "campaign.json"
    path.write_text(json.dumps(campaign.to_dict()), encoding="utf-8")
    assert load_campaign(path) == campaign


def test_campaign_validation():
    with pytest.raises(MetaPromptError):
        _small_campaign(pairs_per_request=5)
    with pytest.raises(MetaPromptError):
        _small_campaign(target_total=2, pairs_per_request=4)
    with pytest.raises(MetaPromptError):
        _small_campaign(balance_tolerance=0.5)
    with pytest.raises(MetaPromptError):
        _small_campaign(concurrency=0)
    base = default_campaign()
    with pytest.raises(MetaPromptError):
        GenerationCampaign(
            domains=(base.domains[0], base.domains[0]),
            pairs_per_request=4,
            target_total=8,
        )
    with pytest.raises(MetaPromptError):
        GenerationCampaign(domains=(), pairs_per_request=4, target_total=8)
