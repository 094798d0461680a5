"""Shared domain types, dataset persistence, splitting, and deduplication."""

from topicguard.core.errors import AbstentionError, InputError, ScoringError
from topicguard.core.records import (
    SOURCES,
    DatasetError,
    LabeledPair,
    PairValidationError,
    PromptDataset,
    deduplicate,
    make_pair,
    normalize_prompt,
    pair_id_for,
    validate_pair,
)
from topicguard.core.splitting import SPLIT_NAMES, SplitError, SplitRatios, split_dataset
from topicguard.core.storage import DatasetFormatError, read_dataset, write_dataset

__all__ = [
    "SOURCES",
    "SPLIT_NAMES",
    "AbstentionError",
    "DatasetError",
    "DatasetFormatError",
    "InputError",
    "LabeledPair",
    "PairValidationError",
    "PromptDataset",
    "ScoringError",
    "SplitError",
    "SplitRatios",
    "deduplicate",
    "make_pair",
    "normalize_prompt",
    "pair_id_for",
    "read_dataset",
    "split_dataset",
    "validate_pair",
    "write_dataset",
]
