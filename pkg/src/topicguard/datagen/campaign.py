"""Campaign orchestration: many provider requests into one balanced dataset.

A campaign fans requests out over a small worker pool but folds results back
in submission order, so a deterministic provider yields a byte-identical
dataset on every run. Requests are bounded (cap = 3x the ideal request count
by default) because dedup can make the target unreachable; anything short of
the target is reported as a shortfall in the dataset metadata, never hidden.
"""

from __future__ import annotations

import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from topicguard.core.records import LabeledPair, PromptDataset
from topicguard.datagen.metaprompt import (
    DEFAULT_STYLE_TAGS,
    DomainSpec,
    MetaPromptError,
    SamplingParams,
    build_meta_prompt,
)
from topicguard.datagen.parsing import GenerationParseError, parse_generation
from topicguard.datagen.providers import ProviderClient, ProviderError, with_retries

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GenerationCampaign:
    """Configuration for one synthetic-data run."""

    domains: tuple[DomainSpec, ...]
    pairs_per_request: int
    target_total: int
    sampling: SamplingParams = field(default_factory=SamplingParams)
    provider_id: str = "mock"
    balance_tolerance: float = 0.05
    max_attempts_per_request: int = 5
    max_consecutive_failures: int = 5
    request_cap_factor: int = 3
    concurrency: int = 4

    def __post_init__(self) -> None:
        object.__setattr__(self, "domains", tuple(self.domains))
        if not self.domains:
            raise MetaPromptError("campaign needs at least one domain")
        names = [d.name for d in self.domains]
        if len(set(names)) != len(names):
            raise MetaPromptError("domain names must be unique within a campaign")
        if self.pairs_per_request < 2 or self.pairs_per_request % 2 != 0:
            raise MetaPromptError("pairs_per_request must be a positive even number")
        if self.target_total < self.pairs_per_request:
            raise MetaPromptError("target_total must be >= pairs_per_request")
        if not 0.0 <= self.balance_tolerance < 0.5:
            raise MetaPromptError("balance_tolerance must be in [0, 0.5)")
        if self.max_attempts_per_request < 1 or self.max_consecutive_failures < 1:
            raise MetaPromptError("retry/failure limits must be positive")
        if self.request_cap_factor < 1 or self.concurrency < 1:
            raise MetaPromptError("request_cap_factor and concurrency must be positive")

    def to_dict(self) -> dict[str, Any]:
        return {
            "domains": [d.to_dict() for d in self.domains],
            "pairs_per_request": self.pairs_per_request,
            "target_total": self.target_total,
            "sampling": self.sampling.to_dict(),
            "provider_id": self.provider_id,
            "balance_tolerance": self.balance_tolerance,
            "max_attempts_per_request": self.max_attempts_per_request,
            "max_consecutive_failures": self.max_consecutive_failures,
            "request_cap_factor": self.request_cap_factor,
            "concurrency": self.concurrency,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "GenerationCampaign":
        return cls(
            domains=tuple(DomainSpec.from_dict(x) for x in d["domains"]),
            pairs_per_request=d["pairs_per_request"],
            target_total=d["target_total"],
            sampling=SamplingParams.from_dict(d.get("sampling", {})),
            provider_id=d.get("provider_id", "mock"),
            balance_tolerance=d.get("balance_tolerance", 0.05),
            max_attempts_per_request=d.get("max_attempts_per_request", 5),
            max_consecutive_failures=d.get("max_consecutive_failures", 5),
            request_cap_factor=d.get("request_cap_factor", 3),
            concurrency=d.get("concurrency", 4),
        )


def load_campaign(path: str | Path) -> GenerationCampaign:
    """Load a campaign config file (JSON, schema mirroring GenerationCampaign)."""
    return GenerationCampaign.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def default_campaign(
    target_total: int = 400,
    pairs_per_request: int = 8,
    seed: int | None = 0,
) -> GenerationCampaign:
    """Stock campaign over a few scoped domains, with edge-case style tags."""
    domains = (
        DomainSpec(
            name="healthcare-policy",
            system_prompt_template=(
                "You are a healthcare policy question-and-answer bot. Answer only "
                "questions about insurance coverage, copay amounts, claims, and benefits."
            ),
            description="Specialized insurance and benefits Q&A.",
            style_tags=DEFAULT_STYLE_TAGS,
        ),
        DomainSpec(
            name="legal-summaries",
            system_prompt_template=(
                "You summarize legal contracts. Given contract text, produce concise "
                "summaries of clauses, obligations, and termination terms."
            ),
            description="Contract summarization assistant.",
            style_tags=DEFAULT_STYLE_TAGS,
        ),
        DomainSpec(
            name="banking-support",
            system_prompt_template=(
                "You are a retail banking support assistant. Help customers with "
                "account balances, card activation, transfers, and branch opening hours."
            ),
            description="Customer support for everyday banking.",
            style_tags=DEFAULT_STYLE_TAGS,
        ),
    )
    return GenerationCampaign(
        domains=domains,
        pairs_per_request=pairs_per_request,
        target_total=target_total,
        sampling=SamplingParams(seed_words=("deductible", "clause", "overdraft"), seed=seed),
    )


def _balance_gap(pairs: list[LabeledPair]) -> float:
    if not pairs:
        return 0.0
    frac = sum(p.label for p in pairs) / len(pairs)
    return abs(frac - 0.5)


def run_campaign(
    campaign: GenerationCampaign,
    provider: ProviderClient,
    sleeper: Callable[[float], None] = time.sleep,
) -> PromptDataset:
    """Run the campaign to completion or to its request/failure bounds.

    The returned dataset is deduplicated, carries the provider identity on
    every pair, and is balanced within `balance_tolerance` (trimming the
    newest majority-label pairs as a last resort). If fewer than
    `target_total` unique pairs were collected, metadata gains a `shortfall`
    record explaining why; partial results are always returned.
    """
    ideal_requests = math.ceil(campaign.target_total / campaign.pairs_per_request)
    max_requests = campaign.request_cap_factor * ideal_requests

    def one_request(index: int) -> list[LabeledPair] | None:
        domain = campaign.domains[index % len(campaign.domains)]
        prompt = build_meta_prompt(
            domain, campaign.sampling, campaign.pairs_per_request, batch_tag=f"{index + 1:04d}"
        )

        def attempt() -> list[LabeledPair]:
            raw = provider.complete(prompt, campaign.sampling)
            return parse_generation(raw, generator_id=provider.identity)

        try:
            return with_retries(
                attempt,
                attempts=campaign.max_attempts_per_request,
                retry_on=(ProviderError, GenerationParseError),
                sleeper=sleeper,
            )
        except (ProviderError, GenerationParseError) as exc:
            logger.warning("request %d failed after retries: %s", index + 1, exc)
            return None

    collected: list[LabeledPair] = []
    seen: set[str] = set()
    requests_issued = 0
    failed_requests = 0
    duplicates_dropped = 0
    consecutive_failures = 0
    abort_reason: str | None = None

    def target_met() -> bool:
        return len(collected) >= campaign.target_total and _balance_gap(collected) <= campaign.balance_tolerance

    with ThreadPoolExecutor(max_workers=campaign.concurrency) as pool:
        next_index = 0
        while not target_met() and requests_issued < max_requests and abort_reason is None:
            wave = min(campaign.concurrency, max_requests - requests_issued)
            futures = [pool.submit(one_request, next_index + offset) for offset in range(wave)]
            next_index += wave
            requests_issued += wave
            for future in futures:
                batch = future.result()
                if abort_reason is not None:
                    continue
                if batch is None:
                    failed_requests += 1
                    consecutive_failures += 1
                    if consecutive_failures >= campaign.max_consecutive_failures:
                        abort_reason = "consecutive_failures"
                    continue
                consecutive_failures = 0
                for pair in batch:
                    if pair.pair_id in seen:
                        duplicates_dropped += 1
                        continue
                    seen.add(pair.pair_id)
                    collected.append(pair)

    balance_trimmed = 0
    while collected and _balance_gap(collected) > campaign.balance_tolerance:
        labels = [p.label for p in collected]
        majority = 1 if labels.count(1) > labels.count(0) else 0
        for idx in range(len(collected) - 1, -1, -1):
            if collected[idx].label == majority:
                collected.pop(idx)
                balance_trimmed += 1
                break

    counts = {0: 0, 1: 0}
    for pair in collected:
        counts[pair.label] += 1

    metadata: dict[str, Any] = {
        "campaign": campaign.to_dict(),
        "generation": {
            "provider": provider.identity,
            "requests_issued": requests_issued,
            "request_cap": max_requests,
            "failed_requests": failed_requests,
            "duplicates_dropped": duplicates_dropped,
            "balance_trimmed": balance_trimmed,
            "pairs_collected": len(collected),
            "label_counts": {str(k): v for k, v in counts.items()},
        },
    }
    if len(collected) < campaign.target_total:
        metadata["shortfall"] = {
            "reason": abort_reason or ("balance_trim" if balance_trimmed else "request_cap"),
            "target_total": campaign.target_total,
            "collected": len(collected),
            "requests_issued": requests_issued,
        }

    return PromptDataset(pairs=tuple(collected), split_assignment={}, metadata=metadata)
