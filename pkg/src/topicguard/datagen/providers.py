"""LLM provider clients: a deterministic offline mock and an HTTP client.

The mock answers the two prompt shapes this package emits (generation
meta-prompts and relevance-judge prompts) and is a pure function of
(prompt, params, seed), so campaigns and tests are reproducible offline.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import re
import time
from abc import ABC, abstractmethod
from typing import Any, Callable, TypeVar

import httpx

from topicguard.datagen.metaprompt import (
    GENERATION_HEADER,
    SamplingParams,
    TEMPLATE_CLOSE,
    TEMPLATE_OPEN,
)

T = TypeVar("T")

ENV_API_KEY = "TOPICGUARD_API_KEY"
ENV_BASE_URL = "TOPICGUARD_BASE_URL"
ENV_MODEL = "TOPICGUARD_MODEL"

JUDGE_HEADER = "You are a strict relevance judge for a scoped LLM application."


class ProviderError(RuntimeError):
    """A provider request failed or returned something unusable."""


class ProviderClient(ABC):
    """Text-completion interface shared by all providers."""

    @property
    @abstractmethod
    def identity(self) -> str:
        """Stable provider/model identifier recorded on generated pairs."""

    @abstractmethod
    def complete(self, prompt: str, params: SamplingParams) -> str:
        """Return the raw completion text for `prompt`."""


def with_retries(
    fn: Callable[[], T],
    attempts: int = 5,
    base_delay: float = 1.0,
    factor: float = 2.0,
    retry_on: tuple[type[Exception], ...] = (ProviderError,),
    sleeper: Callable[[float], None] = time.sleep,
) -> T:
    """Call `fn` with exponential backoff: 1s, 2s, 4s, ... between attempts."""
    if attempts < 1:
        raise ValueError("attempts must be >= 1")
    delay = base_delay
    for attempt in range(1, attempts + 1):
        try:
            return fn()
        except retry_on:
            if attempt == attempts:
                raise
            sleeper(delay)
            delay *= factor
    raise AssertionError("unreachable")


def _stable_seed(*parts: Any) -> int:
    digest = hashlib.sha256("\x1f".join(repr(p) for p in parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


_STOPWORDS = frozenset(
    "you your yours are is was the that this with only answer answers about for and or "
    "not can must will shall a an of in on to from as it its their them they when what "
    "how do does did have has had assistant questions question".split()
)

_ON_TOPIC_OPENERS = (
    "",
    "Hi, ",
    "Quick question: ",
    "I was wondering, ",
    "Please help: ",
    "Hello! ",
)

_ON_TOPIC_FORMS = (
    "what does {a} mean here?",
    "can you explain {a} and how it relates to {b}?",
    "I need help understanding {a}.",
    "how do I deal with {a}?",
    "is {a} covered under {b}?",
    "where can I find details on {a}?",
    "what are the rules for {a}?",
    "does {b} change anything about {a}?",
    "give me a short summary of {a}.",
    "{a}?",
    "my situation involves {a} and {b}, what should I know?",
    "walk me through {a} step by step.",
)

_OFF_TOPIC_OPENERS = (
    "",
    "Hey, ",
    "Ignore that and ",
    "Actually, ",
    "By the way, ",
    "Unrelated, but ",
)

_OFF_TOPIC_FORMS = (
    "write me {t}.",
    "can you give me {t}?",
    "I want {t}.",
    "tell me about {t}.",
    "help me with {t}.",
    "generate {t} for me.",
    "what do you think about {t}?",
    "let's talk about {t} instead.",
    "I need {t} right now.",
    "could you produce {t}?",
)

_OFF_TOPIC_SUBJECTS = (
    "a Python script that sorts a list",
    "a chocolate cake recipe",
    "tonight's football scores",
    "a poem about the ocean",
    "the plot of a famous space movie",
    "travel tips for Tokyo",
    "a workout plan for beginners",
    "the history of jazz music",
    "a cover letter for a marketing job",
    "the capital cities of South America",
    "a horror story set in a lighthouse",
    "advice on buying a used car",
    "the rules of chess",
    "a startup idea for a food app",
    "celebrity gossip from this week",
    "instructions for growing tomatoes",
    "a regex that matches email addresses",
    "an essay on the French Revolution",
    "stock picks for next quarter",
    "a wedding speech for my brother",
    "video game recommendations",
    "the lyrics to a sea shanty",
    "a SQL query joining two tables",
    "tips for training a puppy",
)


class MockProvider(ProviderClient):
    """Deterministic template-filling provider for offline runs and tests.

    Generation prompts get a balanced JSON batch assembled from the domain's
    own words (on-topic) and a fixed pool of out-of-domain requests
    (off-topic). Judge prompts get a keyword-overlap verdict.
    """

    def __init__(self, seed: int = 0):
        self.seed = seed

    @property
    def identity(self) -> str:
        return "mock"

    def complete(self, prompt: str, params: SamplingParams) -> str:
        if prompt.startswith(GENERATION_HEADER):
            return self._generate(prompt, params)
        if prompt.startswith(JUDGE_HEADER):
            return self._judge(prompt)
        raise ProviderError("mock provider does not understand this prompt shape")

    # -- generation -------------------------------------------------------

    def _generate(self, prompt: str, params: SamplingParams) -> str:
        template = _extract_block(prompt)
        on_match = re.search(r"(\d+) on-topic", prompt)
        off_match = re.search(r"(\d+) off-topic", prompt)
        if template is None or on_match is None or off_match is None:
            raise ProviderError("generation prompt is missing template or counts")
        n_on, n_off = int(on_match.group(1)), int(off_match.group(1))

        seed_words: list[str] = []
        seed_match = re.search(r"Seed words.*?: (.+)", prompt)
        if seed_match:
            seed_words = [w.strip() for w in seed_match.group(1).split(",") if w.strip()]

        keywords = list(dict.fromkeys(seed_words + _content_words(template)))
        if not keywords:
            keywords = ["the topic"]

        rng = random.Random(_stable_seed(prompt, params.seed, self.seed))
        records = []
        for _ in range(n_on):
            a, b = rng.choice(keywords), rng.choice(keywords)
            user = rng.choice(_ON_TOPIC_OPENERS) + rng.choice(_ON_TOPIC_FORMS).format(a=a, b=b)
            records.append({"system_prompt": template, "user_prompt": user, "off_topic": False})
        for _ in range(n_off):
            subject = rng.choice(_OFF_TOPIC_SUBJECTS)
            user = rng.choice(_OFF_TOPIC_OPENERS) + rng.choice(_OFF_TOPIC_FORMS).format(t=subject)
            records.append({"system_prompt": template, "user_prompt": user, "off_topic": True})
        rng.shuffle(records)
        return json.dumps(records, ensure_ascii=False)

    # -- judging ----------------------------------------------------------

    def _judge(self, prompt: str) -> str:
        blocks = _extract_blocks(prompt)
        if len(blocks) < 2:
            raise ProviderError("judge prompt is missing system/user blocks")
        system_words = set(_content_words(blocks[0]))
        user_words = _content_words(blocks[1])
        overlap = sum(1 for w in user_words if w in system_words)
        ratio = overlap / max(1, len(user_words))
        p = min(0.98, max(0.02, 1.0 - 2.0 * ratio))
        return json.dumps({"off_topic": p >= 0.5, "confidence": round(p, 4)})


def _extract_block(text: str) -> str | None:
    blocks = _extract_blocks(text)
    return blocks[0] if blocks else None


def _extract_blocks(text: str) -> list[str]:
    pattern = re.compile(
        re.escape(TEMPLATE_OPEN) + r"\n(.*?)\n" + re.escape(TEMPLATE_CLOSE), re.DOTALL
    )
    return [m.group(1) for m in pattern.finditer(text)]


def _content_words(text: str) -> list[str]:
    words = re.findall(r"[a-zA-Z]{4,}", text.lower())
    return [w for w in words if w not in _STOPWORDS]


class HttpProvider(ProviderClient):
    """OpenAI-style chat-completions client configured from the environment.

    Single-attempt by design; retry policy belongs to the caller (see
    `with_retries` and campaign orchestration).
    """

    def __init__(
        self,
        model: str,
        base_url: str,
        api_key: str = "",
        timeout: float = 60.0,
        transport: httpx.BaseTransport | None = None,
    ):
        self.model = model
        self.base_url = base_url.rstrip("/")
        self._client = httpx.Client(
            timeout=timeout,
            transport=transport,
            headers={"Authorization": f"Bearer {api_key}"} if api_key else {},
        )

    @classmethod
    def from_env(cls, **kwargs: Any) -> "HttpProvider":
        model = os.environ.get(ENV_MODEL)
        base_url = os.environ.get(ENV_BASE_URL)
        if not model or not base_url:
            raise ProviderError(
                f"HTTP provider needs {ENV_MODEL} and {ENV_BASE_URL} set "
                f"(plus {ENV_API_KEY} if the endpoint requires a key)"
            )
        return cls(model=model, base_url=base_url, api_key=os.environ.get(ENV_API_KEY, ""), **kwargs)

    @property
    def identity(self) -> str:
        return f"http:{self.model}"

    def complete(self, prompt: str, params: SamplingParams) -> str:
        payload: dict[str, Any] = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": params.temperature,
            "max_tokens": params.max_output_tokens,
        }
        if params.top_p is not None:
            payload["top_p"] = params.top_p
        if params.top_k is not None:
            payload["top_k"] = params.top_k
        if params.seed is not None:
            payload["seed"] = params.seed
        try:
            response = self._client.post(f"{self.base_url}/chat/completions", json=payload)
        except httpx.HTTPError as exc:
            raise ProviderError(f"request failed: {exc}") from exc
        if response.status_code != 200:
            raise ProviderError(f"provider returned HTTP {response.status_code}")
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise ProviderError(f"malformed provider response: {exc}") from exc


def build_provider(provider_id: str, seed: int = 0) -> ProviderClient:
    """Resolve a provider id ("mock" or "http") to a client instance."""
    if provider_id == "mock":
        return MockProvider(seed=seed)
    if provider_id == "http":
        return HttpProvider.from_env()
    raise ProviderError(f"unknown provider {provider_id!r}; expected 'mock' or 'http'")
