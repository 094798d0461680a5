import random
import string

import pytest

from topicguard.core import PromptDataset, SplitError, SplitRatios, make_pair, split_dataset


def _dataset(n_per_class, seed=0):
    rng = random.Random(seed)
    pairs = []
    for label in (0, 1):
        for i in range(n_per_class):
            noise = "".join(rng.choice(string.ascii_lowercase) for _ in range(6))
            pairs.append(make_pair(f"system {noise}", f"user {label} {i} {noise}", label))
    return PromptDataset(pairs=tuple(pairs))


def test_ratios_validation():
    SplitRatios(0.8, 0.1, 0.1)
    with pytest.raises(SplitError):
        SplitRatios(0.8, 0.1, 0.2)
    with pytest.raises(SplitError):
        SplitRatios(1.2, -0.1, -0.1)


def test_degenerate_all_train():
    ds = _dataset(5)
    out = split_dataset(ds, SplitRatios(1.0, 0.0, 0.0), seed=3)
    assert len(out.split("train")) == 10
    assert out.split("val") == ()
    assert out.split("test") == ()


def test_ten_pairs_stratified_largest_remainder():
    # 5 per class, ratios (0.8, 0.1, 0.1): per class the floors are (4, 0, 0)
    # with one leftover at equal 0.5 remainders for val/test; the per-class
    # rotation sends class 0's leftover to val and class 1's to test.
    ds = _dataset(5)
    out = split_dataset(ds, SplitRatios(0.8, 0.1, 0.1), seed=7)
    train, val, test = out.split("train"), out.split("val"), out.split("test")
    assert (len(train), len(val), len(test)) == (8, 1, 1)
    assert {p.label for p in val} == {0}
    assert {p.label for p in test} == {1}
    assert sorted(p.label for p in train) == [0] * 4 + [1] * 4


def test_split_deterministic():
    ds = _dataset(20)
    a = split_dataset(ds, SplitRatios(0.8, 0.1, 0.1), seed=42)
    b = split_dataset(ds, SplitRatios(0.8, 0.1, 0.1), seed=42)
    assert a.split_assignment == b.split_assignment


def test_split_seed_changes_assignment():
    ds = _dataset(30)
    a = split_dataset(ds, SplitRatios(0.8, 0.1, 0.1), seed=1)
    b = split_dataset(ds, SplitRatios(0.8, 0.1, 0.1), seed=2)
    assert a.split_assignment != b.split_assignment


def test_split_sizes_match_largest_remainder_oracle():
    # Independent check: per class, split sizes must equal the unique
    # largest-remainder solution (up to tie rotation the totals are fixed).
    ds = _dataset(13, seed=5)
    out = split_dataset(ds, SplitRatios(0.7, 0.2, 0.1), seed=9)
    for label in (0, 1):
        sizes = [
            sum(1 for p in out.split(name) if p.label == label)
            for name in ("train", "val", "test")
        ]
        # 13 * (0.7, 0.2, 0.1) = (9.1, 2.6, 1.3) -> floors (9, 2, 1), leftover 1
        # goes to val (largest fractional remainder 0.6).
        assert sizes == [9, 3, 1]


def test_split_stratification_balance():
    ds = _dataset(50)
    out = split_dataset(ds, SplitRatios(0.8, 0.1, 0.1), seed=0)
    for name, expected in (("train", 80), ("val", 10), ("test", 10)):
        part = out.split(name)
        labels = [p.label for p in part]
        assert len(part) == expected
        assert abs(labels.count(1) - labels.count(0)) <= 1


def test_split_errors_when_nonzero_split_would_be_empty():
    ds = _dataset(1)  # 2 pairs total
    with pytest.raises(SplitError, match="zero examples"):
        split_dataset(ds, SplitRatios(0.9, 0.05, 0.05), seed=0)


def test_split_empty_dataset_errors():
    with pytest.raises(SplitError):
        split_dataset(PromptDataset(pairs=()), SplitRatios(0.8, 0.1, 0.1), seed=0)


def test_split_covers_all_pairs():
    ds = _dataset(17)
    out = split_dataset(ds, SplitRatios(0.6, 0.2, 0.2), seed=4)
    assert set(out.split_assignment) == {p.pair_id for p in ds.pairs}
