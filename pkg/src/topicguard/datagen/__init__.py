"""Synthetic (system prompt, user prompt, label) generation via an LLM provider."""

from topicguard.datagen.campaign import (
    GenerationCampaign,
    default_campaign,
    load_campaign,
    run_campaign,
)
from topicguard.datagen.metaprompt import (
    DomainSpec,
    MetaPromptError,
    SamplingParams,
    build_meta_prompt,
)
from topicguard.datagen.parsing import GenerationParseError, extract_json_payload, parse_generation
from topicguard.datagen.providers import (
    JUDGE_HEADER,
    HttpProvider,
    MockProvider,
    ProviderClient,
    ProviderError,
    build_provider,
    with_retries,
)

__all__ = [
    "JUDGE_HEADER",
    "DomainSpec",
    "GenerationCampaign",
    "GenerationParseError",
    "HttpProvider",
    "MetaPromptError",
    "MockProvider",
    "ProviderClient",
    "ProviderError",
    "SamplingParams",
    "build_meta_prompt",
    "build_provider",
    "default_campaign",
    "extract_json_payload",
    "load_campaign",
    "parse_generation",
    "run_campaign",
    "with_retries",
]
