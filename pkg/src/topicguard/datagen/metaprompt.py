"""Meta-prompt construction for synthetic pair generation.

The meta-prompt asks a generator LLM for an exactly balanced batch of labeled
(system prompt, user prompt) records in a strict JSON format. Diversity comes
from the domain template, style instructions, verbatim seed words, and the
caller-supplied batch tag.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

TEMPLATE_OPEN = "<<<"
TEMPLATE_CLOSE = ">>>"

GENERATION_HEADER = (
    "You are generating labeled training data for an off-topic prompt guardrail."
)

_STYLE_INSTRUCTIONS = {
    "short": "Include some extremely short or vague user prompts (a few words or even one word).",
    "multi-paragraph": "Include some long, multi-paragraph user prompts.",
    "multilingual": "Include some user prompts written in languages other than English.",
    "adversarial-rephrase": (
        "Include some off-topic requests disguised in on-topic wording, as if trying "
        "to sneak past a scope filter."
    ),
}

DEFAULT_STYLE_TAGS = ("short", "multi-paragraph", "multilingual", "adversarial-rephrase")


class MetaPromptError(ValueError):
    """The meta-prompt request is malformed."""


@dataclass(frozen=True)
class DomainSpec:
    """One application domain to generate pairs for."""

    name: str
    system_prompt_template: str
    description: str = ""
    style_tags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.name.strip():
            raise MetaPromptError("domain name must be non-empty")
        if not self.system_prompt_template.strip():
            raise MetaPromptError(f"domain {self.name!r} has an empty template")
        object.__setattr__(self, "style_tags", tuple(self.style_tags))

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "system_prompt_template": self.system_prompt_template,
            "description": self.description,
            "style_tags": list(self.style_tags),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "DomainSpec":
        return cls(
            name=d["name"],
            system_prompt_template=d["system_prompt_template"],
            description=d.get("description", ""),
            style_tags=tuple(d.get("style_tags", ())),
        )


@dataclass(frozen=True)
class SamplingParams:
    """Provider-side generation knobs plus the diversity seed words."""

    temperature: float = 0.9
    top_k: int | None = None
    top_p: float | None = None
    seed_words: tuple[str, ...] = ()
    max_output_tokens: int = 2048
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise MetaPromptError(f"temperature must be >= 0, got {self.temperature}")
        if self.top_k is not None and self.top_k < 1:
            raise MetaPromptError(f"top_k must be positive, got {self.top_k}")
        if self.top_p is not None and not 0.0 < self.top_p <= 1.0:
            raise MetaPromptError(f"top_p must be in (0, 1], got {self.top_p}")
        if self.max_output_tokens < 1:
            raise MetaPromptError("max_output_tokens must be positive")
        object.__setattr__(self, "seed_words", tuple(self.seed_words))

    def to_dict(self) -> dict[str, Any]:
        return {
            "temperature": self.temperature,
            "top_k": self.top_k,
            "top_p": self.top_p,
            "seed_words": list(self.seed_words),
            "max_output_tokens": self.max_output_tokens,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "SamplingParams":
        return cls(
            temperature=d.get("temperature", 0.9),
            top_k=d.get("top_k"),
            top_p=d.get("top_p"),
            seed_words=tuple(d.get("seed_words", ())),
            max_output_tokens=d.get("max_output_tokens", 2048),
            seed=d.get("seed"),
        )


def build_meta_prompt(
    domain: DomainSpec,
    sampling: SamplingParams,
    n_pairs: int,
    batch_tag: str | None = None,
) -> str:
    """Render the generation instruction for one provider request.

    `n_pairs` must be even so the on/off-topic halves are exact. The batch tag
    is an opaque variation handle; campaigns use it to make otherwise
    identical requests produce different samples.
    """
    if n_pairs < 2 or n_pairs % 2 != 0:
        raise MetaPromptError(f"n_pairs must be a positive even number, got {n_pairs}")
    half = n_pairs // 2

    parts = [
        GENERATION_HEADER,
        "",
        "SYSTEM PROMPT TEMPLATE:",
        TEMPLATE_OPEN,
        domain.system_prompt_template,
        TEMPLATE_CLOSE,
        "",
        f"Domain: {domain.name}." + (f" {domain.description}" if domain.description else ""),
        "",
        f"Produce exactly {n_pairs} records: {half} on-topic and {half} off-topic user "
        "prompts for the system prompt template above.",
        "An off-topic user prompt asks for anything outside the scope the system prompt "
        "defines; an on-topic user prompt stays inside that scope.",
    ]

    if sampling.seed_words:
        parts.append(
            "Seed words, each to be worked verbatim into at least one user prompt: "
            + ", ".join(sampling.seed_words)
        )

    if domain.style_tags:
        parts.append("Style requirements:")
        for tag in domain.style_tags:
            parts.append(
                "- " + _STYLE_INSTRUCTIONS.get(tag, f"Include user prompts with style: {tag}.")
            )

    if batch_tag is not None:
        parts.append(f"Batch reference: {batch_tag}")

    parts.extend(
        [
            "",
            "Return STRICT JSON only, with no commentary: a JSON array of "
            f"{n_pairs} objects, each shaped as",
            '{"system_prompt": "...", "user_prompt": "...", "off_topic": true|false}',
            "where system_prompt is exactly the template above and off_topic is true "
            "for the off-topic records.",
        ]
    )
    return "\n".join(parts)
