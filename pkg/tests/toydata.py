"""Deterministic separable dataset used by training, baseline, and acceptance tests.

Three disjoint-vocabulary domains. Each system prompt names its domain and
lists four of the domain's eight keywords. On-topic user prompts mix domain
keywords with a shared service-request register; off-topic ones draw from a
chatter register disjoint from every domain. A slice of on-topic prompts
uses only keywords the system prompt does not list, so plain lexical overlap
with the system prompt (the cosine baseline) is a real but imperfect signal,
while nearest-exemplar voting and trained classifiers can do better.
"""

from __future__ import annotations

import random

from topicguard.baselines import ExemplarSet
from topicguard.core import LabeledPair, PromptDataset, make_pair

DOMAIN_WORDS = {
    "billing": [
        "invoice", "refund", "overcharge", "subscription",
        "proration", "chargeback", "autopay", "receipt",
    ],
    "fitness": [
        "workout", "stretching", "cardio", "deadlift",
        "endurance", "hydration", "warmup", "posture",
    ],
    "astronomy": [
        "telescope", "nebula", "eclipse", "asteroid",
        "constellation", "supernova", "quasar", "parallax",
    ],
}

DOMAINS = tuple(DOMAIN_WORDS)

# Register shared by on-topic requests in every domain.
SERVICE_WORDS = ["status", "update", "issue", "resolve", "account"]

# Register for off-topic requests; disjoint from all domain vocabularies.
CHATTER_WORDS = [
    "weather", "gossip", "horoscope", "riddle",
    "trivia", "joke", "lottery", "celebrity",
]

FILLER = ["please", "quickly", "today", "thanks", "again", "soon"]

# Toy fixtures use a wide hashed backbone: random-projection crosstalk between
# unrelated tokens shrinks as 1/sqrt(dim), and 64 is too noisy for reliable
# nearest-exemplar ranking over ~20-token prompts.
TOY_CHECKPOINT = "hash-256"


def system_prompt_for(domain: str) -> str:
    head = DOMAIN_WORDS[domain][:4]
    return (
        f"You are the {domain} helpdesk. Answer only questions about "
        f"{head[0]} {head[1]} {head[2]} {head[3]} and nothing else."
    )


def _on_topic_user(rng: random.Random, domain: str) -> str:
    words = DOMAIN_WORDS[domain]
    if rng.random() < 0.85:
        domain_part = rng.sample(words[:4], 2)
    else:
        # Tail-only: in-domain keywords the system prompt never lists.
        domain_part = rng.sample(words[4:], 2)
    tokens = domain_part + rng.sample(SERVICE_WORDS, 3) + rng.sample(FILLER, rng.randint(0, 1))
    rng.shuffle(tokens)
    return " ".join(tokens)


def _off_topic_user(rng: random.Random) -> str:
    tokens = rng.sample(CHATTER_WORDS, 4) + rng.sample(FILLER, rng.randint(1, 2))
    rng.shuffle(tokens)
    return " ".join(tokens)


def _make_unique(rng: random.Random, n: int, label: int, seen: set[str]) -> list[LabeledPair]:
    pairs = []
    while len(pairs) < n:
        domain = rng.choice(DOMAINS)
        if label == 0:
            user = _on_topic_user(rng, domain)
        else:
            user = _off_topic_user(rng)
        pair = make_pair(system_prompt_for(domain), user, label)
        if pair.pair_id in seen:
            continue
        seen.add(pair.pair_id)
        pairs.append(pair)
    return pairs


def make_toy_dataset(n_train: int = 200, n_test: int = 50, seed: int = 2024) -> PromptDataset:
    """Balanced separable dataset with train/test split assignments."""
    rng = random.Random(seed)
    seen: set[str] = set()
    train = _make_unique(rng, n_train // 2, 0, seen) + _make_unique(rng, n_train - n_train // 2, 1, seen)
    test = _make_unique(rng, n_test // 2, 0, seen) + _make_unique(rng, n_test - n_test // 2, 1, seen)
    assignment = {p.pair_id: "train" for p in train}
    assignment.update({p.pair_id: "test" for p in test})
    return PromptDataset(
        pairs=tuple(train + test),
        split_assignment=assignment,
        metadata={"builder": "toy-separable", "seed": seed},
    )


def toy_exemplars(seed: int = 77) -> ExemplarSet:
    """3 on-topic + 3 off-topic exemplars, one per domain.

    On-topic exemplar user prompts cover two listed and two unlisted domain
    keywords plus the service register, so every on-topic query shares tokens
    with its domain's exemplar. Off-topic exemplars cover most of the chatter
    register for the same reason.
    """
    rng = random.Random(seed)
    on = []
    off = []
    for domain in DOMAINS:
        words = DOMAIN_WORDS[domain]
        on_tokens = [words[0], words[2], words[4], words[6]] + rng.sample(SERVICE_WORDS, 3)
        rng.shuffle(on_tokens)
        off_tokens = rng.sample(CHATTER_WORDS, 5) + [rng.choice(FILLER)]
        rng.shuffle(off_tokens)
        on.append(make_pair(system_prompt_for(domain), " ".join(on_tokens), 0))
        off.append(make_pair(system_prompt_for(domain), " ".join(off_tokens), 1))
    return ExemplarSet(on_topic=tuple(on), off_topic=tuple(off))


FIXTURE_ON = (system_prompt_for("billing"), "invoice refund status update please")
FIXTURE_OFF = (system_prompt_for("billing"), "horoscope gossip trivia lottery joke please")
