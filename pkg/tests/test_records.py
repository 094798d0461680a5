import random
import string

import pytest
from hypothesis import given
from hypothesis import strategies as st

from topicguard.core import (
    LabeledPair,
    PairValidationError,
    PromptDataset,
    deduplicate,
    make_pair,
    normalize_prompt,
    pair_id_for,
    validate_pair,
)


def test_validate_pair_passthrough():
    pair = validate_pair(
        {
            "system_prompt": "You are a healthcare Q&A bot",
            "user_prompt": "What is my copay?",
            "label": 0,
        }
    )
    assert pair.label == 0
    assert pair.system_prompt == "You are a healthcare Q&A bot"
    assert pair.source == "synthetic"
    assert pair.pair_id == pair_id_for(pair.system_prompt, pair.user_prompt)


def test_validate_pair_rejects_empty_user_prompt():
    with pytest.raises(PairValidationError):
        validate_pair({"system_prompt": "You are a bot", "user_prompt": "", "label": 1})


def test_validate_pair_rejects_whitespace_only_prompt():
    with pytest.raises(PairValidationError):
        validate_pair({"system_prompt": "  \n\t ", "user_prompt": "hi", "label": 0})


@pytest.mark.parametrize("label", [2, -1, "maybe", None, 0.5])
def test_validate_pair_rejects_bad_labels(label):
    with pytest.raises(PairValidationError):
        validate_pair({"system_prompt": "s", "user_prompt": "u", "label": label})


@pytest.mark.parametrize(
    "label,expected",
    [(0, 0), (1, 1), (True, 1), (False, 0), ("1", 1), ("false", 0), (1.0, 1)],
)
def test_validate_pair_accepts_boolean_forms(label, expected):
    assert validate_pair({"system_prompt": "s", "user_prompt": "u", "label": label}).label == expected


def test_validate_pair_missing_fields():
    with pytest.raises(PairValidationError, match="user_prompt"):
        validate_pair({"system_prompt": "s", "label": 0})


def test_pair_id_ignores_trailing_whitespace():
    a = validate_pair({"system_prompt": "You are a bot  ", "user_prompt": "hi", "label": 0})
    b = validate_pair({"system_prompt": "You are a bot", "user_prompt": "hi", "label": 0})
    assert a.pair_id == b.pair_id


def test_pair_id_collapses_internal_whitespace_and_preserves_case():
    assert pair_id_for("a \t\n b", "c") == pair_id_for("a b", "c")
    assert pair_id_for("A b", "c") != pair_id_for("a b", "c")


def test_pair_id_no_boundary_collision():
    assert pair_id_for("a b", "c") != pair_id_for("a", "b c")


@given(
    st.text(min_size=1).filter(lambda s: s.strip()),
    st.text(min_size=1).filter(lambda s: s.strip()),
)
def test_pair_id_deterministic_under_renormalization(s, u):
    pair = make_pair(s, u, 0)
    again = make_pair(pair.system_prompt, pair.user_prompt, 0)
    assert pair.pair_id == again.pair_id
    assert normalize_prompt(pair.system_prompt) == pair.system_prompt


def test_deduplicate_empty():
    assert deduplicate([]) == []


def test_deduplicate_exact_duplicate():
    p = make_pair("s", "u", 1)
    assert deduplicate([p, p]) == [p]


def _random_pair(rng):
    words = lambda n: " ".join(
        "".join(rng.choice(string.ascii_lowercase) for _ in range(4)) for _ in range(n)
    )
    return make_pair(words(3), words(5), rng.randint(0, 1))


def _brute_force_dedup(pairs):
    kept = []
    for pair in pairs:
        duplicate = False
        for other in kept:
            if (
                normalize_prompt(other.system_prompt) == normalize_prompt(pair.system_prompt)
                and normalize_prompt(other.user_prompt) == normalize_prompt(pair.user_prompt)
            ):
                duplicate = True
                break
        if not duplicate:
            kept.append(pair)
    return kept


def test_deduplicate_matches_pairwise_oracle():
    rng = random.Random(7)
    pairs = [_random_pair(rng) for _ in range(90)]
    planted = [pairs[rng.randrange(len(pairs))] for _ in range(10)]
    mixed = pairs + planted
    rng.shuffle(mixed)

    deduped = deduplicate(mixed)
    oracle = _brute_force_dedup(mixed)
    assert deduped == oracle
    assert len(deduped) == len({p.pair_id for p in mixed})


def test_deduplicate_idempotent():
    rng = random.Random(11)
    pairs = [_random_pair(rng) for _ in range(40)] * 2
    once = deduplicate(pairs)
    assert deduplicate(once) == once


def test_deduplicate_first_occurrence_wins_and_order_preserved():
    a = make_pair("s1", "u1", 0, generator_id="first")
    b = make_pair("s2", "u2", 1)
    a_dup = make_pair("s1", "u1", 0, generator_id="second")
    assert deduplicate([a, b, a_dup]) == [a, b]


def test_dataset_rejects_duplicate_ids():
    p = make_pair("s", "u", 0)
    with pytest.raises(Exception, match="duplicate"):
        PromptDataset(pairs=(p, p))


def test_dataset_rejects_inconsistent_pair_id():
    p = LabeledPair(system_prompt="s", user_prompt="u", label=0, pair_id="bogus")
    with pytest.raises(Exception, match="pair_id"):
        PromptDataset(pairs=(p,))


def test_dataset_rejects_unknown_split_reference():
    p = make_pair("s", "u", 0)
    with pytest.raises(Exception, match="unknown pair_id"):
        PromptDataset(pairs=(p,), split_assignment={"nope": "train"})


def test_dataset_split_accessor():
    a = make_pair("s", "u", 0)
    b = make_pair("s", "v", 1)
    ds = PromptDataset(pairs=(a, b), split_assignment={a.pair_id: "train", b.pair_id: "test"})
    assert ds.split("train") == (a,)
    assert ds.split("test") == (b,)
    assert ds.split("val") == ()
    assert ds.label_counts() == {0: 1, 1: 1}
